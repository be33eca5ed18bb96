//! Dataset ingestion.
//!
//! Input is either a JSON array of records or one JSON record per line. Raw
//! records (`hagrid`, `webglm_qa`) look like
//!
//! ```json
//! {"id": "12", "query": "...", "quotes": ["...", "..."], "answers": [["sentence [1].", "..."]]}
//! ```
//!
//! and cleaned records (`hagrid_clean`) carry pre-parsed sentences:
//!
//! ```json
//! {"id": "12", "query": "...", "quotes": ["..."],
//!  "answers": [[{"text": "sentence.", "refs": [1], "label": "one"}]]}
//! ```
//!
//! A few layout variants seen in the published dumps are accepted as well:
//! `question` for `query`, `references` for `quotes`, quotes given as
//! `{"idx": 1, "text": "..."}`, answers given as `{"sentences": [...]}` and a
//! single unsplit `answer` string.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::markers::parse_reference_markers;
use super::{CleanLabel, LabeledSentence, QuerySample, Quote};
use crate::document::split_sentences;
use crate::error::{Error, Result};

/// Input record layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schema {
    Hagrid,
    WebglmQa,
    HagridClean,
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "hagrid" => Ok(Schema::Hagrid),
            "webglm_qa" | "webglm" => Ok(Schema::WebglmQa),
            "hagrid_clean" => Ok(Schema::HagridClean),
            other => Err(Error::precondition(format!(
                "unknown schema {other:?} (expected hagrid, webglm_qa or hagrid_clean)"
            ))),
        }
    }
}

impl Schema {
    pub fn as_str(self) -> &'static str {
        match self {
            Schema::Hagrid => "hagrid",
            Schema::WebglmQa => "webglm_qa",
            Schema::HagridClean => "hagrid_clean",
        }
    }

    fn is_cleaned(self) -> bool {
        self == Schema::HagridClean
    }
}

/// A recoverable problem found while loading.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Warning {
    pub record: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sentence_id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct Loaded {
    pub samples: Vec<QuerySample>,
    pub warnings: Vec<Warning>,
}

/// Parses every record in `stream` into a [`QuerySample`].
pub fn load_samples<R: Read>(mut stream: R, schema: Schema) -> Result<Loaded> {
    let mut text = String::new();
    stream
        .read_to_string(&mut text)
        .map_err(|e| Error::io("<dataset stream>", e))?;
    let records = parse_records(&text)?;

    let mut loaded = Loaded::default();
    for (i, record) in records.iter().enumerate() {
        let sample = parse_record(i, record, schema, &mut loaded.warnings)?;
        loaded.samples.push(sample);
    }
    for w in &loaded.warnings {
        log::warn!("record {}: {}", w.record, w.message);
    }
    Ok(loaded)
}

/// [`load_samples`] over a file.
pub fn read_samples(path: &Path, schema: Schema) -> Result<Loaded> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    load_samples(std::io::BufReader::new(file), schema)
}

fn parse_records(text: &str) -> Result<Vec<Value>> {
    let trimmed = text.trim_start();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    if trimmed.starts_with('[') {
        return serde_json::from_str::<Vec<Value>>(trimmed).map_err(|e| Error::Schema {
            record: 0,
            message: format!("invalid JSON array: {e}"),
        });
    }
    let mut out = Vec::new();
    for (i, item) in serde_json::Deserializer::from_str(trimmed)
        .into_iter::<Value>()
        .enumerate()
    {
        out.push(item.map_err(|e| Error::Schema {
            record: i,
            message: format!("invalid JSON: {e}"),
        })?);
    }
    Ok(out)
}

fn schema_err(record: usize, message: impl Into<String>) -> Error {
    Error::Schema {
        record,
        message: message.into(),
    }
}

fn parse_record(
    record: usize,
    value: &Value,
    schema: Schema,
    warnings: &mut Vec<Warning>,
) -> Result<QuerySample> {
    let obj = value
        .as_object()
        .ok_or_else(|| schema_err(record, "record is not a JSON object"))?;

    let id = match obj.get("id").or_else(|| obj.get("query_id")) {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        Some(_) => return Err(schema_err(record, "id must be a string or number")),
        None => record.to_string(),
    };

    let query = obj
        .get("query")
        .or_else(|| obj.get("question"))
        .and_then(Value::as_str)
        .ok_or_else(|| schema_err(record, "missing string field `query`"))?
        .to_string();

    let quotes_value = obj
        .get("quotes")
        .or_else(|| obj.get("references"))
        .ok_or_else(|| schema_err(record, "missing field `quotes`"))?;
    let quotes = parse_quotes(record, quotes_value)?;
    let known: BTreeSet<u32> = quotes.iter().map(|q| q.index).collect();

    let raw_answers = collect_answers(record, obj)?;
    let mut answers = Vec::with_capacity(raw_answers.len());
    for (ai, raw_answer) in raw_answers.into_iter().enumerate() {
        let mut sentences = Vec::with_capacity(raw_answer.len());
        for (ti, raw) in raw_answer.into_iter().enumerate() {
            let sentence_id = format!("{ai}.{ti}");
            let mut warn = |message: String| {
                warnings.push(Warning {
                    record,
                    sentence_id: Some(sentence_id.clone()),
                    message,
                })
            };
            let mut sentence = if schema.is_cleaned() {
                parse_cleaned_sentence(record, &raw)?
            } else {
                let text = raw
                    .as_str()
                    .or_else(|| raw.get("text").and_then(Value::as_str))
                    .ok_or_else(|| schema_err(record, "answer sentence must be a string"))?;
                match parse_reference_markers(text) {
                    Ok(parsed) => {
                        for span in &parsed.unmatched {
                            warn(format!(
                                "bracketed span {:?} is not a citation marker; kept in text",
                                &text[span.clone()]
                            ));
                        }
                        LabeledSentence::from_refs(parsed.text, parsed.refs)
                    }
                    Err(e) => {
                        warn(format!("{e}; keeping raw text without references"));
                        LabeledSentence::from_refs(text.trim().to_string(), BTreeSet::new())
                    }
                }
            };
            let unknown: Vec<u32> = sentence.refs.difference(&known).copied().collect();
            if !unknown.is_empty() {
                warn(format!("cites unknown quote indices {unknown:?}; dropped"));
                for u in &unknown {
                    sentence.refs.remove(u);
                }
                if sentence.clean_label.is_none() {
                    sentence = LabeledSentence::from_refs(sentence.text, sentence.refs);
                }
            }
            sentences.push(sentence);
        }
        answers.push(sentences);
    }

    Ok(QuerySample {
        id,
        query,
        quotes,
        answers,
    })
}

fn parse_quotes(record: usize, value: &Value) -> Result<Vec<Quote>> {
    let items = value
        .as_array()
        .ok_or_else(|| schema_err(record, "`quotes` must be an array"))?;
    let mut quotes = Vec::with_capacity(items.len());
    let mut seen = BTreeSet::new();
    for (pos, item) in items.iter().enumerate() {
        let (index, text) = match item {
            Value::String(s) => (pos as u32 + 1, s.as_str()),
            Value::Object(o) => {
                let index = o
                    .get("idx")
                    .or_else(|| o.get("index"))
                    .map(|v| {
                        v.as_u64()
                            .filter(|&i| i >= 1 && i <= u32::MAX as u64)
                            .ok_or_else(|| schema_err(record, "quote index must be a positive integer"))
                    })
                    .transpose()?
                    .map_or(pos as u32 + 1, |i| i as u32);
                let text = o
                    .get("text")
                    .and_then(Value::as_str)
                    .ok_or_else(|| schema_err(record, "quote object without `text`"))?;
                (index, text)
            }
            _ => return Err(schema_err(record, "quote must be a string or object")),
        };
        if !seen.insert(index) {
            return Err(schema_err(record, format!("duplicate quote index {index}")));
        }
        quotes.push(Quote {
            index,
            text: text.to_string(),
        });
    }
    Ok(quotes)
}

/// Answers as lists of per-sentence JSON values.
fn collect_answers(record: usize, obj: &serde_json::Map<String, Value>) -> Result<Vec<Vec<Value>>> {
    if let Some(answers) = obj.get("answers") {
        let items = answers
            .as_array()
            .ok_or_else(|| schema_err(record, "`answers` must be an array"))?;
        return items
            .iter()
            .map(|a| match a {
                Value::Array(sentences) => Ok(sentences.clone()),
                Value::Object(o) => {
                    if let Some(Value::Array(sentences)) = o.get("sentences") {
                        Ok(sentences.clone())
                    } else if let Some(Value::String(s)) = o.get("answer") {
                        Ok(split_answer(s))
                    } else {
                        Err(schema_err(record, "answer object without `sentences`"))
                    }
                }
                Value::String(s) => Ok(split_answer(s)),
                _ => Err(schema_err(record, "answer must be an array of sentences")),
            })
            .collect();
    }
    if let Some(Value::String(s)) = obj.get("answer") {
        return Ok(vec![split_answer(s)]);
    }
    Err(schema_err(record, "missing field `answers`"))
}

fn split_answer(answer: &str) -> Vec<Value> {
    split_sentences(answer)
        .into_iter()
        .map(Value::String)
        .collect()
}

fn parse_cleaned_sentence(record: usize, raw: &Value) -> Result<LabeledSentence> {
    let obj = raw
        .as_object()
        .ok_or_else(|| schema_err(record, "cleaned sentence must be an object"))?;
    let text = obj
        .get("text")
        .and_then(Value::as_str)
        .ok_or_else(|| schema_err(record, "cleaned sentence without `text`"))?;
    let refs = match obj.get("refs") {
        None | Some(Value::Null) => BTreeSet::new(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| {
                v.as_u64()
                    .filter(|&i| i >= 1 && i <= u32::MAX as u64)
                    .map(|i| i as u32)
                    .ok_or_else(|| schema_err(record, "refs must be positive integers"))
            })
            .collect::<Result<_>>()?,
        Some(_) => return Err(schema_err(record, "`refs` must be an array")),
    };
    let sentence = LabeledSentence::from_refs(text.to_string(), refs);
    match obj.get("label") {
        None | Some(Value::Null) => Ok(sentence),
        Some(Value::String(l)) => {
            let label = CleanLabel::from_str(l).map_err(|e| schema_err(record, e.to_string()))?;
            Ok(sentence.with_clean_label(label))
        }
        Some(_) => Err(schema_err(record, "`label` must be a string")),
    }
}

/// Cleaned labels from a sidecar file, keyed by `(sample_id, sentence_id)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelOverrides {
    labels: HashMap<(String, String), CleanLabel>,
}

#[derive(Deserialize)]
struct LabelLine {
    sample_id: Value,
    sentence_id: String,
    label: String,
}

/// Reads a sidecar of `{"sample_id", "sentence_id", "label"}` lines.
pub fn load_cleaned_labels<R: Read>(mut stream: R) -> Result<LabelOverrides> {
    let mut text = String::new();
    stream
        .read_to_string(&mut text)
        .map_err(|e| Error::io("<label stream>", e))?;
    let mut labels = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: LabelLine = serde_json::from_str(line)
            .map_err(|e| schema_err(i, format!("invalid label line: {e}")))?;
        let sample_id = match parsed.sample_id {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            _ => return Err(schema_err(i, "sample_id must be a string or number")),
        };
        let label = CleanLabel::from_str(&parsed.label)?;
        labels.insert((sample_id, parsed.sentence_id), label);
    }
    Ok(LabelOverrides { labels })
}

impl LabelOverrides {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, sample_id: &str, sentence_id: &str) -> Option<CleanLabel> {
        self.labels
            .get(&(sample_id.to_string(), sentence_id.to_string()))
            .copied()
    }

    /// Applies the labels in place; returns a warning for every label that
    /// names a sentence not present in `samples`.
    pub fn apply(&self, samples: &mut [QuerySample]) -> Vec<Warning> {
        let mut used = 0;
        for sample in samples.iter_mut() {
            for (ai, answer) in sample.answers.iter_mut().enumerate() {
                for (ti, s) in answer.iter_mut().enumerate() {
                    if let Some(label) = self.get(&sample.id, &format!("{ai}.{ti}")) {
                        *s = s.clone().with_clean_label(label);
                        used += 1;
                    }
                }
            }
        }
        if used == self.labels.len() {
            return Vec::new();
        }
        let present: std::collections::HashSet<(String, String)> = samples
            .iter()
            .flat_map(|s| {
                s.answers.iter().enumerate().flat_map(move |(ai, a)| {
                    (0..a.len()).map(move |ti| (s.id.clone(), format!("{ai}.{ti}")))
                })
            })
            .collect();
        let mut missing: Vec<_> = self
            .labels
            .keys()
            .filter(|k| !present.contains(*k))
            .collect();
        missing.sort();
        missing
            .into_iter()
            .map(|(sample, sentence)| Warning {
                record: 0,
                sentence_id: Some(sentence.clone()),
                message: format!("label for unknown sentence {sample}/{sentence} ignored"),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RefClass;

    const EVERGREEN: &str = r#"{"id": "ev", "query": "What does it mean to be an evergreen tree?",
        "quotes": ["Trees are either evergreen, having foliage that persists and remains green.",
                   "In botany, an evergreen is a plant that has leaves throughout the year."],
        "answers": [["To be an evergreen tree means to have foliage that persists and remains green."],
                    ["It is a plant that has leaves throughout the year and never completely loses its foliage [1,2].",
                     "Most conifers, including pine and fir trees, are evergreens [1]."]]}"#;

    #[test]
    fn loads_raw_record() {
        let loaded = load_samples(EVERGREEN.as_bytes(), Schema::Hagrid).unwrap();
        assert_eq!(loaded.samples.len(), 1);
        let s = &loaded.samples[0];
        assert_eq!(s.quotes.len(), 2);
        assert_eq!(s.answers.len(), 2);
        assert_eq!(s.answers[0][0].ref_class, RefClass::Zero);
        assert_eq!(s.answers[1][0].refs, BTreeSet::from([1, 2]));
        assert_eq!(s.answers[1][0].ref_class, RefClass::Multi);
        assert!(s.answers[1][1].text.ends_with("are evergreens."));
        assert!(loaded.warnings.is_empty());
    }

    #[test]
    fn array_and_lines_agree() {
        let lines = format!("{}\n{}\n", EVERGREEN.replace('\n', " "), EVERGREEN.replace('\n', " "));
        let array = format!("[{EVERGREEN},{EVERGREEN}]");
        let a = load_samples(lines.as_bytes(), Schema::Hagrid).unwrap();
        let b = load_samples(array.as_bytes(), Schema::Hagrid).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.samples.len(), 2);
    }

    #[test]
    fn empty_stream() {
        let loaded = load_samples("".as_bytes(), Schema::Hagrid).unwrap();
        assert!(loaded.samples.is_empty());
    }

    #[test]
    fn schema_violation_names_record() {
        let input = format!("{}\n{{\"query\": 3}}\n", EVERGREEN.replace('\n', " "));
        match load_samples(input.as_bytes(), Schema::Hagrid) {
            Err(Error::Schema { record, .. }) => assert_eq!(record, 1),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_quote_index_is_dropped_with_warning() {
        let input = r#"{"query": "q", "quotes": ["a b c"], "answers": [["Fact [1][7]."]]}"#;
        let loaded = load_samples(input.as_bytes(), Schema::Hagrid).unwrap();
        let s = &loaded.samples[0].answers[0][0];
        assert_eq!(s.refs, BTreeSet::from([1]));
        assert_eq!(s.ref_class, RefClass::One);
        assert_eq!(loaded.warnings.len(), 1);
    }

    #[test]
    fn malformed_marker_keeps_raw_text() {
        let input = r#"{"query": "q", "quotes": ["a"], "answers": [["Fact [1-]."]]}"#;
        let loaded = load_samples(input.as_bytes(), Schema::Hagrid).unwrap();
        let s = &loaded.samples[0].answers[0][0];
        assert_eq!(s.text, "Fact [1-].");
        assert!(s.refs.is_empty());
        assert_eq!(loaded.warnings.len(), 1);
    }

    #[test]
    fn hagrid_layout_variant() {
        let input = r#"{"query_id": 7, "query": "q",
            "quotes": [{"idx": 1, "docid": "x", "text": "first"}, {"idx": 2, "text": "second"}],
            "answers": [{"answer": "ignored", "sentences": [{"text": "One [2].", "index": 0}]}]}"#;
        let loaded = load_samples(input.as_bytes(), Schema::Hagrid).unwrap();
        let s = &loaded.samples[0];
        assert_eq!(s.id, "7");
        assert_eq!(s.answers[0][0].refs, BTreeSet::from([2]));
    }

    #[test]
    fn cleaned_schema_uses_labels() {
        let input = r#"{"id": "a", "query": "q", "quotes": ["x", "y", "z", "w"],
            "answers": [[{"text": "Oxygen is 21%.", "refs": [1,2,3,4], "label": "one"},
                         {"text": "Cairns Airport, Wikipedia.", "refs": [2], "label": "invalid"}]]}"#;
        let loaded = load_samples(input.as_bytes(), Schema::HagridClean).unwrap();
        let a = &loaded.samples[0].answers[0];
        assert_eq!(a[0].ref_class, RefClass::One);
        assert_eq!(a[1].ref_class, RefClass::Zero);
        assert_eq!(a[1].clean_label, Some(CleanLabel::Invalid));
    }

    #[test]
    fn cleaned_schema_rejects_bad_label() {
        let input = r#"{"query": "q", "quotes": ["x"], "answers": [[{"text": "t", "refs": [], "label": "two"}]]}"#;
        assert!(matches!(
            load_samples(input.as_bytes(), Schema::HagridClean),
            Err(Error::Schema { record: 0, .. })
        ));
    }

    #[test]
    fn sidecar_labels_override() {
        let mut loaded = load_samples(EVERGREEN.as_bytes(), Schema::Hagrid).unwrap();
        let sidecar = "{\"sample_id\": \"ev\", \"sentence_id\": \"1.0\", \"label\": \"one\"}\n\
                       {\"sample_id\": \"ev\", \"sentence_id\": \"9.9\", \"label\": \"zero\"}\n";
        let labels = load_cleaned_labels(sidecar.as_bytes()).unwrap();
        let warnings = labels.apply(&mut loaded.samples);
        assert_eq!(warnings.len(), 1);
        let s = &loaded.samples[0].answers[1][0];
        assert_eq!(s.ref_class, RefClass::One);
        assert_eq!(s.refs.len(), 2);
    }
}
