//! Sentence segmentation and transcript-style attribution reports.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::attribution::{attribute_for_class, embed_quotes, AttributionResult, EmbeddingProvider};
use crate::corpus::{Quote, RefClass};
use crate::error::{Error, Result};
use crate::features::{tokenize, FeatureExtractor};
use crate::forest::ModelBundle;

/// Lowercased abbreviations (without the final period) that never end a sentence.
const ABBREVIATIONS: &[&str] = &[
    "e.g", "i.e", "dr", "mr", "mrs", "ms", "prof", "fig", "figs", "eq", "eqs", "vs", "vol", "pp",
    "st", "jr", "sr", "inc", "ltd", "cf", "approx", "ca", "dept", "univ", "ch", "sec", "ref",
    "refs", "tab",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '”', '’'];

fn is_terminal(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// The whitespace-delimited word that ends at byte `end` (exclusive).
fn word_before(text: &str, end: usize) -> &str {
    let start = text[..end]
        .char_indices()
        .rev()
        .find(|(_, c)| c.is_whitespace())
        .map_or(0, |(i, c)| i + c.len_utf8());
    &text[start..end]
}

fn is_abbreviation(text: &str, dot: usize, rest: &str) -> bool {
    let word = word_before(text, dot);
    let word = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return true;
    }
    // "et al."
    if lower == "al" {
        let before = text[..dot - word.len()].trim_end();
        return before.to_lowercase().ends_with("et");
    }
    // "No. 5"
    if word == "No" {
        return rest.trim_start().starts_with(|c: char| c.is_ascii_digit());
    }
    // Single-letter initials: "J. Smith".
    let mut chars = word.chars();
    matches!((chars.next(), chars.next()), (Some(c), None) if c.is_uppercase())
}

/// Length of a run of citation groups like `[1][2]` at the start of `s`.
fn marker_run(s: &str) -> usize {
    let mut len = 0;
    let mut rest = s;
    while let Some(inner) = rest.strip_prefix('[') {
        match inner.find(']') {
            Some(close)
                if close > 0
                    && inner[..close]
                        .chars()
                        .all(|c| c.is_ascii_digit() || matches!(c, ',' | '-' | ' ')) =>
            {
                len += close + 2;
                rest = &inner[close + 1..];
            }
            _ => break,
        }
    }
    len
}

/// Splits text into sentences on `.`, `!` or `?` followed by whitespace or
/// the end of text, and on blank lines. Abbreviations and initials are not
/// boundaries. Closing quotes, brackets and citation groups that follow the
/// punctuation stay with the sentence.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut i = 0;
    let bytes_len = text.len();
    let push = |out: &mut Vec<String>, s: &str| {
        let t = s.split_whitespace().collect::<Vec<_>>().join(" ");
        if !t.is_empty() {
            out.push(t);
        }
    };
    while i < bytes_len {
        let c = text[i..].chars().next().unwrap();
        if c == '\n' {
            let rest = &text[i + 1..];
            let blank = rest
                .chars()
                .take_while(|c| c.is_whitespace())
                .any(|c| c == '\n');
            if blank {
                push(&mut out, &text[start..i]);
                start = i + 1;
            }
            i += 1;
            continue;
        }
        if !is_terminal(c) {
            i += c.len_utf8();
            continue;
        }
        let mut end = i + 1;
        while let Some(n) = text[end..].chars().next() {
            if is_terminal(n) || CLOSERS.contains(&n) {
                end += n.len_utf8();
            } else {
                break;
            }
        }
        end += marker_run(&text[end..]);
        let rest = &text[end..];
        let at_boundary = rest.is_empty() || rest.starts_with(char::is_whitespace);
        if at_boundary && !(c == '.' && end == i + 1 && is_abbreviation(text, i, rest)) {
            push(&mut out, &text[start..end]);
            start = end;
        }
        i = end;
    }
    push(&mut out, &text[start..]);
    out
}

fn is_fragment(sentence: &str) -> bool {
    let words = tokenize(sentence).word_count();
    let terminated = sentence
        .trim_end_matches(|c: char| CLOSERS.contains(&c))
        .ends_with(is_terminal);
    words <= 1 || (words < 3 && !terminated)
}

/// Splits a source document into quotes indexed from 1 in document order.
/// Fragments (one word, or fewer than three words without terminal
/// punctuation) are merged into the previous quote, or into the next one
/// when they open the document.
pub fn segment_document(text: &str) -> Result<Vec<Quote>> {
    let mut merged: Vec<String> = Vec::new();
    let mut pending: Option<String> = None;
    for s in split_sentences(text) {
        if is_fragment(&s) {
            match merged.last_mut() {
                Some(prev) => {
                    prev.push(' ');
                    prev.push_str(&s);
                }
                None => {
                    let p = pending.get_or_insert_with(String::new);
                    if !p.is_empty() {
                        p.push(' ');
                    }
                    p.push_str(&s);
                }
            }
            continue;
        }
        match pending.take() {
            Some(p) => merged.push(format!("{p} {s}")),
            None => merged.push(s),
        }
    }
    if let Some(p) = pending {
        merged.push(p);
    }
    if merged.is_empty() {
        return Err(Error::precondition("document contains no text"));
    }
    Ok(merged
        .into_iter()
        .enumerate()
        .map(|(i, text)| Quote {
            index: i as u32 + 1,
            text,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub sentence: String,
    /// Absent when feature extraction or prediction failed.
    pub predicted_class: Option<RefClass>,
    pub result: Option<AttributionResult>,
    /// Attributed quotes with their full text.
    pub quotes: Vec<Quote>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionReport {
    pub provider: String,
    pub quote_count: usize,
    pub entries: Vec<ReportEntry>,
}

impl AttributionReport {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| e.error.is_some()).count()
    }

    /// The transcript layout: an input block and an output block per sentence.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "> INPUT Sentence:");
            let _ = writeln!(out, "    {}", e.sentence);
            let _ = writeln!(out, "< OUTPUT Quotes:");
            if let Some(err) = &e.error {
                let _ = writeln!(out, "    (attribution failed: {err})");
            } else if e.quotes.is_empty() {
                let _ = writeln!(out, "    (no attribution required)");
            } else {
                for q in &e.quotes {
                    let _ = writeln!(out, "    [{}] {}", q.index, q.text);
                }
                if let Some(d) = e.result.as_ref().and_then(|r| r.distance) {
                    let _ = writeln!(out, "    (distance {d:.6})");
                }
            }
        }
        out
    }

    pub fn render_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Segments `document` into quotes, splits `answer` into sentences and routes
/// each sentence through the classifier and the embedding matcher. Embedding
/// failures are recorded on the affected entry and the rest of the report is
/// still produced.
pub fn attribute_document(
    answer: &str,
    document: &str,
    model: &ModelBundle,
    provider: &dyn EmbeddingProvider,
) -> Result<AttributionReport> {
    attribute_document_with(answer, document, model, &model.extractor(), provider)
}

/// [`attribute_document`] with an explicit feature extractor, for models
/// trained against non-bundled lexicons.
pub fn attribute_document_with(
    answer: &str,
    document: &str,
    model: &ModelBundle,
    extractor: &FeatureExtractor,
    provider: &dyn EmbeddingProvider,
) -> Result<AttributionReport> {
    let quotes = segment_document(document)?;
    let sentences = split_sentences(answer);
    if sentences.is_empty() {
        return Err(Error::precondition("answer contains no sentences"));
    }
    // A failure here only affects sentences that need attribution.
    let quote_vectors = embed_quotes(&quotes, provider).map_err(|e| e.to_string());
    let mut entries = Vec::with_capacity(sentences.len());
    for sentence in sentences {
        let class = model.forest.predict(&extractor.extract(&sentence))?;
        let outcome = match (&quote_vectors, class) {
            (_, RefClass::Zero) => Ok(AttributionResult::skipped()),
            (Ok(qv), _) => attribute_for_class(class, &sentence, qv, provider).map_err(|e| e.to_string()),
            (Err(e), _) => Err(e.clone()),
        };
        let entry = match outcome {
            Ok(result) => ReportEntry {
                quotes: quotes
                    .iter()
                    .filter(|q| result.refs.contains(&q.index))
                    .cloned()
                    .collect(),
                sentence,
                predicted_class: Some(class),
                result: Some(result),
                error: None,
            },
            Err(e) => ReportEntry {
                sentence,
                predicted_class: Some(class),
                result: None,
                quotes: Vec::new(),
                error: Some(e),
            },
        };
        entries.push(entry);
    }
    Ok(AttributionReport {
        provider: provider.identity().to_string(),
        quote_count: quotes.len(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_plain_sentences() {
        assert_eq!(segment_document("A b c. D e f.").unwrap().len(), 2);
    }

    #[test]
    fn figure_abbreviation_is_not_a_boundary() {
        let q = segment_document("See Fig. 2 for details. Next sentence.").unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q[0].text, "See Fig. 2 for details.");
        assert_eq!(q[1].index, 2);
    }

    #[test]
    fn empty_document_is_fatal() {
        assert!(segment_document("").is_err());
        assert!(segment_document("  \n\n ").is_err());
    }

    #[test]
    fn abbreviations_and_initials() {
        let s = split_sentences(
            "Smith et al. found it, e.g. in mice. J. Doe agreed! Is No. 5 right? Yes.",
        );
        assert_eq!(
            s,
            [
                "Smith et al. found it, e.g. in mice.",
                "J. Doe agreed!",
                "Is No. 5 right?",
                "Yes."
            ]
        );
    }

    #[test]
    fn lowercase_no_ends_a_sentence() {
        assert_eq!(split_sentences("The answer is no. It was").len(), 2);
    }

    #[test]
    fn markers_and_closers_stay_with_sentence() {
        let s = split_sentences("It grows.[1][2] He said \"stop.\" Then 3.5 m long.");
        assert_eq!(s, ["It grows.[1][2]", "He said \"stop.\"", "Then 3.5 m long."]);
    }

    #[test]
    fn blank_lines_split() {
        assert_eq!(split_sentences("Title line\n\nBody text here."), ["Title line", "Body text here."]);
    }

    #[test]
    fn fragments_merge() {
        let q = segment_document("Intro\n\nThe first real sentence. Table 1\n\nAnother full sentence here.").unwrap();
        let texts: Vec<&str> = q.iter().map(|q| q.text.as_str()).collect();
        assert_eq!(
            texts,
            ["Intro The first real sentence. Table 1", "Another full sentence here."]
        );
    }
}
