//! The 24 sentence features.
//!
//! | id | feature | id | feature |
//! |----|---------|----|---------|
//! | 0 | unique / total words | 12 | unique words |
//! | 1 | named-entity density | 13 | mean bigram probability |
//! | 2 | clause-depth proxy | 14 | mean trigram probability |
//! | 3 | Flesch reading ease | 15 | pronoun ratio |
//! | 4 | word entropy (bits) | 16 | passive-voice ratio |
//! | 5 | mean synsets per word | 17 | all-entity indicator |
//! | 6 | smoothed noun/verb ratio | 18 | SMOG |
//! | 7 | stopword proportion | 19 | Coleman–Liau |
//! | 8 | punctuation ratio | 20 | ARI |
//! | 9 | mean characters per word | 21 | Dale–Chall |
//! | 10 | syllables | 22 | Linsear Write |
//! | 11 | words | 23 | Gunning Fog |

mod extract;
pub mod lexicon;
pub mod ngram;
pub mod pos;
pub mod readability;
pub mod syllables;
pub mod tokenize;

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{LabeledSentence, RefClass};
use crate::error::{Error, Result};

pub use extract::extract_text;
pub use lexicon::Lexicons;
pub use ngram::NgramModel;
pub use syllables::count_syllables;
pub use tokenize::{tokenize, TokenizedSentence};

pub const FEATURE_COUNT: usize = 24;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "lexical_diversity",
    "ne_density",
    "clause_depth",
    "flesch_reading_ease",
    "word_entropy",
    "synsets_per_word",
    "noun_verb_ratio",
    "stopword_ratio",
    "punctuation_ratio",
    "chars_per_word",
    "syllables",
    "words",
    "unique_words",
    "bigram_probability",
    "trigram_probability",
    "pronoun_ratio",
    "passive_ratio",
    "ne_sentence",
    "smog",
    "coleman_liau",
    "ari",
    "dale_chall",
    "linsear_write",
    "gunning_fog",
];

/// Features bounded to `[0, 1]`.
pub const RATIO_FEATURES: [usize; 6] = [0, 1, 7, 8, 15, 16];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: [f64; FEATURE_COUNT],
    /// Set for sentences without a single word.
    pub degenerate: bool,
}

impl FeatureVector {
    /// Vector assigned to a sentence without words: zeros, except the
    /// n-gram probabilities which are 1.
    pub fn degenerate() -> Self {
        let mut values = [0.0; FEATURE_COUNT];
        values[13] = 1.0;
        values[14] = 1.0;
        FeatureVector {
            values,
            degenerate: true,
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Fails on the first NaN or infinite value.
    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFiniteFeature { index }),
            None => Ok(()),
        }
    }
}

/// Frozen n-gram models plus lexicons; extraction is pure given these.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    pub bigram: NgramModel,
    pub trigram: NgramModel,
    pub lexicons: Arc<Lexicons>,
}

impl FeatureExtractor {
    /// Fits both n-gram models on `train_texts` and uses the bundled lexicons.
    pub fn fit<S: AsRef<str> + Sync>(train_texts: &[S]) -> Result<Self> {
        Self::fit_with(train_texts, Lexicons::bundled())
    }

    pub fn fit_with<S: AsRef<str> + Sync>(train_texts: &[S], lexicons: Arc<Lexicons>) -> Result<Self> {
        Ok(FeatureExtractor {
            bigram: NgramModel::fit(train_texts, 2)?,
            trigram: NgramModel::fit(train_texts, 3)?,
            lexicons,
        })
    }

    pub fn extract(&self, text: &str) -> FeatureVector {
        extract_text(text, &self.bigram, &self.trigram, &self.lexicons)
    }

    /// Extracts in parallel; output order follows input order.
    pub fn extract_all<S: AsRef<str> + Sync>(&self, texts: &[S]) -> Vec<FeatureVector> {
        texts.par_iter().map(|t| self.extract(t.as_ref())).collect()
    }
}

/// Features of one labeled sentence.
pub fn extract_features(
    s: &LabeledSentence,
    bigram: &NgramModel,
    trigram: &NgramModel,
    lexicons: &Lexicons,
) -> FeatureVector {
    extract_text(&s.text, bigram, trigram, lexicons)
}

/// Writes a header `f0,...,f23,label` and one row per vector.
pub fn write_csv<W: Write>(mut w: W, rows: &[FeatureVector], labels: &[RefClass]) -> Result<()> {
    if rows.len() != labels.len() {
        return Err(Error::precondition(format!(
            "{} feature rows but {} labels",
            rows.len(),
            labels.len()
        )));
    }
    let io = |e| Error::io("<feature csv>", e);
    let header: Vec<String> = (0..FEATURE_COUNT).map(|i| format!("f{i}")).collect();
    writeln!(w, "{},label", header.join(",")).map_err(io)?;
    for (row, label) in rows.iter().zip(labels) {
        let cells: Vec<String> = row.values.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{},{}", cells.join(","), label).map_err(io)?;
    }
    Ok(())
}
