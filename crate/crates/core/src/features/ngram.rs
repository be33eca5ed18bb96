//! Word n-gram model with add-one smoothing.
//!
//! Sentences are lowercased, tokenized and padded with `order - 1` start
//! symbols and one end symbol. The vocabulary size `V` counts the distinct
//! training words plus the end symbol, so for every context the smoothed
//! probabilities `(c(h, w) + 1) / (c(h) + V)` sum to one over the vocabulary.
//! Words never seen in training get the floor `1 / (c(h) + V)`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::tokenize::tokenize;
use crate::error::{Error, Result};

const START: u32 = 0;
const END: u32 = 1;
const UNKNOWN: u32 = 2;
const FIRST_WORD: u32 = 3;

const START_SYMBOL: &str = "<s>";
const END_SYMBOL: &str = "</s>";
const UNKNOWN_SYMBOL: &str = "<unk>";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "NgramFile", try_from = "NgramFile")]
pub struct NgramModel {
    order: usize,
    words: HashMap<String, u32>,
    counts: HashMap<Vec<u32>, u32>,
    context_counts: HashMap<Vec<u32>, u32>,
}

/// Serialized form: sorted, so equal models produce identical bytes.
#[derive(Serialize, Deserialize)]
struct NgramFile {
    order: usize,
    vocabulary: Vec<String>,
    ngrams: Vec<(Vec<String>, u32)>,
}

impl NgramModel {
    /// Counts padded n-grams of lowercased word tokens over `texts`.
    pub fn fit<S: AsRef<str>>(texts: &[S], order: usize) -> Result<Self> {
        if !(2..=3).contains(&order) {
            return Err(Error::precondition(format!(
                "n-gram order must be 2 or 3, got {order}"
            )));
        }
        let tokenized: Vec<Vec<String>> = texts.iter().map(|t| lower_words(t.as_ref())).collect();
        let mut vocabulary: Vec<&str> = tokenized.iter().flatten().map(String::as_str).collect();
        vocabulary.sort_unstable();
        vocabulary.dedup();
        let words: HashMap<String, u32> = vocabulary
            .iter()
            .enumerate()
            .map(|(i, w)| (w.to_string(), FIRST_WORD + i as u32))
            .collect();

        let mut model = NgramModel {
            order,
            words,
            counts: HashMap::new(),
            context_counts: HashMap::new(),
        };
        for sentence in &tokenized {
            let padded = model.pad(sentence);
            for gram in padded.windows(order) {
                *model.counts.entry(gram.to_vec()).or_default() += 1;
                *model
                    .context_counts
                    .entry(gram[..order - 1].to_vec())
                    .or_default() += 1;
            }
        }
        Ok(model)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Distinct training words plus the end symbol; 1 for an empty model.
    pub fn vocabulary_size(&self) -> usize {
        self.words.len() + 1
    }

    /// Distinct n-grams seen in training.
    pub fn ngram_count(&self) -> usize {
        self.counts.len()
    }

    /// Padded n-gram occurrences seen in training; bounds every context count.
    pub fn total_count(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    fn id(&self, word: &str) -> u32 {
        self.words.get(word).copied().unwrap_or(UNKNOWN)
    }

    fn pad(&self, words: &[String]) -> Vec<u32> {
        let mut padded = vec![START; self.order - 1];
        padded.extend(words.iter().map(|w| self.id(w)));
        padded.push(END);
        padded
    }

    fn smoothed(&self, gram: &[u32]) -> f64 {
        let joint = self.counts.get(gram).copied().unwrap_or(0) as f64;
        let context = self
            .context_counts
            .get(&gram[..gram.len() - 1])
            .copied()
            .unwrap_or(0) as f64;
        (joint + 1.0) / (context + self.vocabulary_size() as f64)
    }

    /// P(`next` | `context`), words given as lowercase strings. The context
    /// must hold `order - 1` entries; `"<s>"` and `"</s>"` denote padding.
    pub fn probability(&self, context: &[&str], next: &str) -> f64 {
        assert_eq!(context.len(), self.order - 1, "context length must be order - 1");
        let sym = |w: &str| match w {
            START_SYMBOL => START,
            END_SYMBOL => END,
            UNKNOWN_SYMBOL => UNKNOWN,
            w => self.id(w),
        };
        let gram: Vec<u32> = context.iter().map(|w| sym(w)).chain([sym(next)]).collect();
        self.smoothed(&gram)
    }

    /// Smoothed probability of every padded n-gram of `text`.
    pub fn sentence_probabilities(&self, text: &str) -> Vec<f64> {
        let padded = self.pad(&lower_words(text));
        padded.windows(self.order).map(|g| self.smoothed(g)).collect()
    }

    /// Arithmetic mean of [`Self::sentence_probabilities`].
    pub fn mean_probability(&self, text: &str) -> f64 {
        let probs = self.sentence_probabilities(text);
        probs.iter().sum::<f64>() / probs.len() as f64
    }
}

fn lower_words(text: &str) -> Vec<String> {
    tokenize(text)
        .word_tokens
        .into_iter()
        .map(|w| w.to_lowercase())
        .collect()
}

impl From<NgramModel> for NgramFile {
    fn from(m: NgramModel) -> Self {
        let mut by_id: Vec<(&String, u32)> = m.words.iter().map(|(w, &i)| (w, i)).collect();
        by_id.sort_by_key(|&(_, i)| i);
        let names: HashMap<u32, &str> = by_id.iter().map(|&(w, i)| (i, w.as_str())).collect();
        let name = |i: u32| -> String {
            match i {
                START => START_SYMBOL.to_string(),
                END => END_SYMBOL.to_string(),
                UNKNOWN => UNKNOWN_SYMBOL.to_string(),
                i => names[&i].to_string(),
            }
        };
        let ngrams: BTreeMap<Vec<String>, u32> = m
            .counts
            .iter()
            .map(|(g, &c)| (g.iter().map(|&i| name(i)).collect(), c))
            .collect();
        NgramFile {
            order: m.order,
            vocabulary: by_id.into_iter().map(|(w, _)| w.clone()).collect(),
            ngrams: ngrams.into_iter().collect(),
        }
    }
}

impl TryFrom<NgramFile> for NgramModel {
    type Error = String;

    fn try_from(f: NgramFile) -> std::result::Result<Self, String> {
        if !(2..=3).contains(&f.order) {
            return Err(format!("invalid n-gram order {}", f.order));
        }
        let words: HashMap<String, u32> = f
            .vocabulary
            .into_iter()
            .enumerate()
            .map(|(i, w)| (w, FIRST_WORD + i as u32))
            .collect();
        let mut model = NgramModel {
            order: f.order,
            words,
            counts: HashMap::new(),
            context_counts: HashMap::new(),
        };
        for (gram, count) in f.ngrams {
            if gram.len() != f.order || count == 0 {
                return Err("malformed n-gram entry".to_string());
            }
            let ids: Vec<u32> = gram
                .iter()
                .map(|w| match w.as_str() {
                    START_SYMBOL => Ok(START),
                    END_SYMBOL => Ok(END),
                    w => model
                        .words
                        .get(w)
                        .copied()
                        .ok_or_else(|| format!("n-gram word {w:?} not in vocabulary")),
                })
                .collect::<std::result::Result<_, _>>()?;
            *model
                .context_counts
                .entry(ids[..f.order - 1].to_vec())
                .or_default() += count;
            model.counts.insert(ids, count);
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bigram_add_one() {
        let m = NgramModel::fit(&["a b", "a b"], 2).unwrap();
        // V = {a, b} + </s> = 3; c(a) = 2, c(a b) = 2.
        assert_eq!(m.vocabulary_size(), 3);
        assert!((m.probability(&["a"], "b") - 3.0 / 5.0).abs() < 1e-15);
        assert!((m.probability(&["a"], "a") - 1.0 / 5.0).abs() < 1e-15);
        assert!((m.probability(&["<s>"], "a") - 3.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn trigram_padding() {
        let m = NgramModel::fit(&["a b"], 3).unwrap();
        assert_eq!(m.ngram_count(), 3);
        // (<s>,<s>,a), (<s>,a,b), (a,b,</s>) each seen once; V = 3.
        assert!((m.probability(&["<s>", "<s>"], "a") - 2.0 / 4.0).abs() < 1e-15);
        assert!((m.probability(&["a", "b"], "</s>") - 2.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn empty_model_is_uniform_over_one_symbol() {
        let m = NgramModel::fit::<&str>(&[], 2).unwrap();
        assert_eq!(m.vocabulary_size(), 1);
        assert_eq!(m.mean_probability("anything at all"), 1.0);
    }

    #[test]
    fn sums_to_one_for_fixed_context() {
        let m = NgramModel::fit(&["the cat sat", "the dog sat down", "a cat ran"], 2).unwrap();
        for ctx in ["<s>", "the", "cat", "sat", "zebra"] {
            let total: f64 = ["the", "cat", "sat", "dog", "down", "a", "ran", "</s>"]
                .iter()
                .map(|w| m.probability(&[ctx], w))
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "context {ctx}: {total}");
        }
    }

    #[test]
    fn rejects_bad_order() {
        assert!(NgramModel::fit(&["a"], 4).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let m = NgramModel::fit(&["the cat sat", "the dog sat down"], 3).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: NgramModel = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
        assert_eq!(json, serde_json::to_string(&back).unwrap());
    }
}
