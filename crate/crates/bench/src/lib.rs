//! Fixtures shared by the benchmarks.

use preattr::eval::{generate_synthetic, SyntheticConfig, SyntheticCorpus};

/// The default 500-sentence synthetic corpus.
pub fn corpus() -> SyntheticCorpus {
    generate_synthetic(&SyntheticConfig::default()).expect("default synthetic corpus")
}

/// Sentence texts of `corpus`, in order.
pub fn texts(corpus: &SyntheticCorpus) -> Vec<&str> {
    corpus.corpus.sentences.iter().map(|s| s.sentence.text.as_str()).collect()
}
