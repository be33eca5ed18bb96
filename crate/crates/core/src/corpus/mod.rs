//! Dataset records, citation-marker parsing, deduplication, class labels and
//! stratified splitting.

mod dedupe;
mod load;
pub mod markers;
mod split;

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dedupe::{assign_ref_class, normalize_and_dedupe, normalized_key};
pub use dedupe::dedupe;
pub use load::{
    load_cleaned_labels, load_samples, read_samples, LabelOverrides, Loaded, Schema, Warning,
};
pub use markers::{parse_reference_markers, render_with_markers, ParsedSentence};
pub use split::stratified_split;

/// How many references a sentence needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RefClass {
    Zero,
    One,
    Multi,
}

impl RefClass {
    pub const ALL: [RefClass; 3] = [RefClass::Zero, RefClass::One, RefClass::Multi];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn from_ref_count(n: usize) -> Self {
        match n {
            0 => RefClass::Zero,
            1 => RefClass::One,
            _ => RefClass::Multi,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RefClass::Zero => "zero",
            RefClass::One => "one",
            RefClass::Multi => "multi",
        }
    }
}

impl fmt::Display for RefClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Human-assigned label from a cleaned dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CleanLabel {
    Zero,
    One,
    Multi,
    /// No attributable content (a bare citation, a URL). Trained as `Zero`.
    Invalid,
}

impl CleanLabel {
    pub fn ref_class(self) -> RefClass {
        match self {
            CleanLabel::Zero | CleanLabel::Invalid => RefClass::Zero,
            CleanLabel::One => RefClass::One,
            CleanLabel::Multi => RefClass::Multi,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CleanLabel::Zero => "zero",
            CleanLabel::One => "one",
            CleanLabel::Multi => "multi",
            CleanLabel::Invalid => "invalid",
        }
    }
}

impl FromStr for CleanLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "zero" | "0" => Ok(CleanLabel::Zero),
            "one" | "1" => Ok(CleanLabel::One),
            "multi" | "multiple" | "2+" => Ok(CleanLabel::Multi),
            "invalid" => Ok(CleanLabel::Invalid),
            _ => Err(Error::InvalidLabel(s.to_string())),
        }
    }
}

/// Where a sentence's class came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    /// Derived from the number of cited references.
    Dataset,
    /// Taken from a cleaned label.
    CleanedOverride,
}

/// An indexed source passage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quote {
    /// 1-based index, as cited in answers.
    pub index: u32,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub text: String,
    pub refs: BTreeSet<u32>,
    pub ref_class: RefClass,
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clean_label: Option<CleanLabel>,
}

impl LabeledSentence {
    /// A sentence labeled from its reference count.
    pub fn from_refs(text: impl Into<String>, refs: BTreeSet<u32>) -> Self {
        let ref_class = RefClass::from_ref_count(refs.len());
        LabeledSentence {
            text: text.into(),
            refs,
            ref_class,
            origin: Origin::Dataset,
            clean_label: None,
        }
    }

    /// Applies a cleaned label; the label wins over the reference count.
    pub fn with_clean_label(mut self, label: CleanLabel) -> Self {
        self.clean_label = Some(label);
        self.ref_class = label.ref_class();
        self.origin = Origin::CleanedOverride;
        self
    }

    /// References a correct attribution is judged against; empty for `Zero`.
    pub fn gold_refs(&self) -> BTreeSet<u32> {
        match self.ref_class {
            RefClass::Zero => BTreeSet::new(),
            _ => self.refs.clone(),
        }
    }

    /// The label written to cleaned corpus files.
    pub fn label_str(&self) -> &'static str {
        match self.clean_label {
            Some(l) => l.as_str(),
            None => self.ref_class.as_str(),
        }
    }
}

/// One dataset record: a query, its quotes, and one or two answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuerySample {
    pub id: String,
    pub query: String,
    pub quotes: Vec<Quote>,
    pub answers: Vec<Vec<LabeledSentence>>,
}

impl QuerySample {
    pub fn quote(&self, index: u32) -> Option<&Quote> {
        self.quotes.iter().find(|q| q.index == index)
    }

    pub fn sentence_count(&self) -> usize {
        self.answers.iter().map(Vec::len).sum()
    }
}

/// Quotes of one sample, shared by every sentence of that sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleQuotes {
    pub id: String,
    pub quotes: Vec<Quote>,
}

/// A sentence in a corpus, with a back-reference to its sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSentence {
    /// Position of the owning sample in [`LabeledCorpus::samples`].
    pub sample: usize,
    /// `"<answer>.<sentence>"`, zero-based, of the first occurrence.
    pub sentence_id: String,
    pub sentence: LabeledSentence,
}

/// Per-class sentence counts, indexed by [`RefClass::index`].
pub type ClassCounts = [usize; 3];

/// Sentence-level view of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCorpus {
    pub samples: Arc<Vec<SampleQuotes>>,
    pub sentences: Vec<CorpusSentence>,
    pub class_counts: ClassCounts,
}

/// One line of a cleaned corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanedRecord {
    pub sample_id: String,
    pub sentence_id: String,
    pub text: String,
    pub refs: Vec<u32>,
    pub label: String,
}

impl LabeledCorpus {
    pub fn new(samples: Arc<Vec<SampleQuotes>>, sentences: Vec<CorpusSentence>) -> Self {
        let class_counts = count_classes(sentences.iter().map(|s| s.sentence.ref_class));
        LabeledCorpus {
            samples,
            sentences,
            class_counts,
        }
    }

    /// Every answer sentence of every sample, in order, without merging.
    pub fn from_samples(samples: &[QuerySample]) -> Self {
        let mut quotes = Vec::with_capacity(samples.len());
        let mut sentences = Vec::new();
        for (si, sample) in samples.iter().enumerate() {
            quotes.push(SampleQuotes {
                id: sample.id.clone(),
                quotes: sample.quotes.clone(),
            });
            for (ai, answer) in sample.answers.iter().enumerate() {
                for (ti, s) in answer.iter().enumerate() {
                    sentences.push(CorpusSentence {
                        sample: si,
                        sentence_id: format!("{ai}.{ti}"),
                        sentence: s.clone(),
                    });
                }
            }
        }
        LabeledCorpus::new(Arc::new(quotes), sentences)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn labels(&self) -> Vec<RefClass> {
        self.sentences.iter().map(|s| s.sentence.ref_class).collect()
    }

    pub fn quotes_of(&self, sentence: &CorpusSentence) -> &[Quote] {
        &self.samples[sentence.sample].quotes
    }

    /// Corpus restricted to `indices` (in the given order), sharing quotes.
    pub fn subset(&self, indices: &[usize]) -> LabeledCorpus {
        LabeledCorpus::new(
            Arc::clone(&self.samples),
            indices.iter().map(|&i| self.sentences[i].clone()).collect(),
        )
    }

    pub fn cleaned_records(&self) -> impl Iterator<Item = CleanedRecord> + '_ {
        self.sentences.iter().map(|s| CleanedRecord {
            sample_id: self.samples[s.sample].id.clone(),
            sentence_id: s.sentence_id.clone(),
            text: s.sentence.text.clone(),
            refs: s.sentence.refs.iter().copied().collect(),
            label: s.sentence.label_str().to_string(),
        })
    }

    /// Writes one JSON object per line: `{sample_id, sentence_id, text, refs, label}`.
    pub fn write_cleaned_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for rec in self.cleaned_records() {
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")
                .map_err(|e| Error::io("<cleaned corpus>", e))?;
        }
        Ok(())
    }
}

pub fn count_classes(labels: impl IntoIterator<Item = RefClass>) -> ClassCounts {
    let mut counts = [0; 3];
    for c in labels {
        counts[c.index()] += 1;
    }
    counts
}
