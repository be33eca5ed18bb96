//! Synthetic corpus whose gold references are the unique embedding minimizers.
//!
//! Quotes are strings of invented words, with no word shared between quotes
//! of a sample. Zero sentences use only stopwords, One sentences copy a quote
//! minus one word, and Multi sentences interleave the words of two quotes.
//! Every One and Multi sentence is checked against the builtin embedder and
//! redrawn until its gold set wins by a clear margin.

use std::collections::{BTreeSet, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attribution::{
    attribute_closest, attribute_closest_pair, cosine_distance, EmbeddingProvider, HashEmbedder,
    QuoteVector,
};
use crate::corpus::{LabeledCorpus, LabeledSentence, QuerySample, Quote, RefClass};
use crate::error::{Error, Result};
use crate::features::Lexicons;

const ONSETS: &[&str] = &[
    "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "gr", "kl", "tr",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u"];
const MARGIN: f64 = 1e-3;
const MAX_ATTEMPTS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub seed: u64,
    pub n_samples: usize,
    pub quotes_per_sample: usize,
    pub sentences_per_sample: usize,
    /// Target Zero/One/Multi shares; counts are apportioned exactly.
    pub proportions: [f64; 3],
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            seed: 0,
            n_samples: 100,
            quotes_per_sample: 5,
            sentences_per_sample: 5,
            proportions: [0.25, 0.5, 0.25],
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub samples: Vec<QuerySample>,
    pub corpus: LabeledCorpus,
}

/// Largest-remainder apportionment of `total` over `shares`.
pub fn apportion(total: usize, shares: [f64; 3]) -> [usize; 3] {
    let sum: f64 = shares.iter().sum();
    let exact = shares.map(|s| s / sum * total as f64);
    let mut counts = exact.map(|e| e.floor() as usize);
    let mut order = [0, 1, 2];
    order.sort_by(|&a, &b| {
        (exact[b] - exact[b].floor())
            .total_cmp(&(exact[a] - exact[a].floor()))
            .then(a.cmp(&b))
    });
    let short = total - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

struct Generator<'a> {
    rng: ChaCha8Rng,
    stopwords: Vec<&'a str>,
    lexicons: &'a Lexicons,
    embedder: HashEmbedder,
}

fn capitalize(words: &[String]) -> String {
    let mut s = words.join(" ");
    if let Some(first) = s.get(..1) {
        let upper = first.to_uppercase();
        s.replace_range(..1, &upper);
    }
    s.push('.');
    s
}

impl Generator<'_> {
    fn pseudo_word(&mut self) -> String {
        loop {
            let syllables = self.rng.random_range(2..=3);
            let mut w = String::new();
            for _ in 0..syllables {
                w.push_str(ONSETS.choose(&mut self.rng).unwrap());
                w.push_str(NUCLEI.choose(&mut self.rng).unwrap());
            }
            if !self.lexicons.is_stopword(&w) {
                return w;
            }
        }
    }

    fn quote_words(&mut self, used: &mut HashSet<String>) -> Vec<String> {
        let len = self.rng.random_range(6..=9);
        let mut words = Vec::with_capacity(len);
        while words.len() < len {
            let w = self.pseudo_word();
            if used.insert(w.clone()) {
                words.push(w);
            }
        }
        words
    }

    fn zero_sentence(&mut self) -> String {
        let len = self.rng.random_range(4..=8);
        let words: Vec<String> = (0..len)
            .map(|_| self.stopwords.choose(&mut self.rng).unwrap().to_string())
            .collect();
        capitalize(&words)
    }

    fn one_sentence(&mut self, quote: &[String]) -> String {
        let mut words = quote.to_vec();
        let drop = self.rng.random_range(1..words.len());
        words.remove(drop);
        capitalize(&words)
    }

    fn multi_sentence(&mut self, a: &[String], b: &[String]) -> String {
        let mut words = Vec::with_capacity(a.len() + b.len());
        for i in 0..a.len().max(b.len()) {
            words.extend(a.get(i).cloned());
            words.extend(b.get(i).cloned());
        }
        capitalize(&words)
    }

    /// The gold set wins both matchers, and beats every other candidate by `MARGIN`.
    fn is_unique_minimizer(&self, sentence: &str, quotes: &[QuoteVector], gold: &BTreeSet<u32>) -> Result<bool> {
        let v = self.embedder.embed(sentence)?;
        let pair = attribute_closest_pair(&v, quotes)?;
        if &pair.refs != gold {
            return Ok(false);
        }
        if gold.len() == 1 && &attribute_closest(&v, quotes)?.refs != gold {
            return Ok(false);
        }
        let best = pair.distance.expect("distance");
        for (i, a) in quotes.iter().enumerate() {
            let single: BTreeSet<u32> = [a.index].into();
            if &single != gold && cosine_distance(&v, &a.vector)? < best + MARGIN {
                return Ok(false);
            }
            for b in &quotes[i + 1..] {
                let set: BTreeSet<u32> = [a.index, b.index].into();
                if &set != gold && cosine_distance(&v, &a.vector.mean_with(&b.vector)?)? < best + MARGIN {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Builds a corpus per `config`; identical configs give identical corpora.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<SyntheticCorpus> {
    if config.quotes_per_sample < 3 {
        return Err(Error::precondition("synthetic samples need at least 3 quotes"));
    }
    if config.n_samples == 0 || config.sentences_per_sample == 0 {
        return Err(Error::precondition("synthetic corpus would be empty"));
    }
    let lexicons = Lexicons::bundled();
    let mut stopwords: Vec<&str> = lexicons
        .stopwords
        .iter()
        .map(String::as_str)
        .filter(|w| w.len() > 1 && w.chars().all(|c| c.is_ascii_lowercase()))
        .collect();
    stopwords.sort_unstable();
    let mut g = Generator {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        stopwords,
        lexicons: &lexicons,
        embedder: HashEmbedder,
    };

    let total = config.n_samples * config.sentences_per_sample;
    let counts = apportion(total, config.proportions);
    let mut classes: Vec<RefClass> = RefClass::ALL
        .iter()
        .flat_map(|&c| std::iter::repeat_n(c, counts[c.index()]))
        .collect();
    classes.shuffle(&mut g.rng);

    let mut samples = Vec::with_capacity(config.n_samples);
    for (s, slot) in classes.chunks(config.sentences_per_sample).enumerate() {
        let mut used = HashSet::new();
        let quote_words: Vec<Vec<String>> = (0..config.quotes_per_sample)
            .map(|_| g.quote_words(&mut used))
            .collect();
        let quotes: Vec<Quote> = quote_words
            .iter()
            .enumerate()
            .map(|(i, w)| Quote {
                index: i as u32 + 1,
                text: capitalize(w),
            })
            .collect();
        let vectors = crate::attribution::embed_quotes(&quotes, &g.embedder)?;
        let mut answer = Vec::with_capacity(slot.len());
        for &class in slot {
            let sentence = match class {
                RefClass::Zero => LabeledSentence::from_refs(g.zero_sentence(), BTreeSet::new()),
                _ => {
                    let mut attempt = 0;
                    loop {
                        attempt += 1;
                        if attempt > MAX_ATTEMPTS {
                            return Err(Error::precondition(
                                "could not draw a sentence with a unique gold minimizer",
                            ));
                        }
                        let mut picks: Vec<usize> = (0..quote_words.len()).collect();
                        picks.shuffle(&mut g.rng);
                        let (text, gold): (String, BTreeSet<u32>) = if class == RefClass::One {
                            (g.one_sentence(&quote_words[picks[0]]), [picks[0] as u32 + 1].into())
                        } else {
                            let (a, b) = (picks[0].min(picks[1]), picks[0].max(picks[1]));
                            (
                                g.multi_sentence(&quote_words[a], &quote_words[b]),
                                [a as u32 + 1, b as u32 + 1].into(),
                            )
                        };
                        if g.is_unique_minimizer(&text, &vectors, &gold)? {
                            break LabeledSentence::from_refs(text, gold);
                        }
                    }
                }
            };
            answer.push(sentence);
        }
        samples.push(QuerySample {
            id: format!("synthetic-{s}"),
            query: format!("Synthetic query {s}?"),
            quotes,
            answers: vec![answer],
        });
    }
    let corpus = LabeledCorpus::from_samples(&samples);
    Ok(SyntheticCorpus { samples, corpus })
}

/// `n_samples` samples of five sentences each, mixed about 25/50/25.
pub fn generate_synthetic_corpus(seed: u64, n_samples: usize, quotes_per_sample: usize) -> Result<LabeledCorpus> {
    Ok(generate_synthetic(&SyntheticConfig {
        seed,
        n_samples,
        quotes_per_sample,
        ..Default::default()
    })?
    .corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apportionment_is_exact() {
        assert_eq!(apportion(500, [0.25, 0.5, 0.25]), [125, 250, 125]);
        assert_eq!(apportion(10, [1.0, 1.0, 1.0]), [4, 3, 3]);
        assert_eq!(apportion(7, [0.2, 0.5, 0.3]), [1, 4, 2]);
    }

    #[test]
    fn deterministic_with_requested_counts() {
        let a = generate_synthetic_corpus(3, 20, 4).unwrap();
        let b = generate_synthetic_corpus(3, 20, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.class_counts, [25, 50, 25]);
        assert_ne!(a, generate_synthetic_corpus(4, 20, 4).unwrap());
    }

    #[test]
    fn zero_sentences_share_no_words_with_quotes() {
        let c = generate_synthetic(&SyntheticConfig {
            n_samples: 10,
            ..Default::default()
        })
        .unwrap();
        for s in &c.corpus.sentences {
            if s.sentence.ref_class != RefClass::Zero {
                continue;
            }
            let words: HashSet<String> = s.sentence.text.to_lowercase().trim_end_matches('.').split(' ').map(String::from).collect();
            for q in c.corpus.quotes_of(s) {
                for w in q.text.to_lowercase().trim_end_matches('.').split(' ') {
                    assert!(!words.contains(w));
                }
            }
        }
    }

    #[test]
    fn too_few_quotes() {
        assert!(generate_synthetic_corpus(0, 5, 2).is_err());
    }
}
