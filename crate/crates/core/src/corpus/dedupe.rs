use std::collections::HashMap;
use std::str::FromStr;

use super::markers::collapse_whitespace;
use super::{CleanLabel, CorpusSentence, LabeledCorpus, LabeledSentence, QuerySample, RefClass};
use crate::error::Result;

/// Identity used to detect duplicate sentences: whitespace collapsed, case folded.
pub fn normalized_key(text: &str) -> String {
    collapse_whitespace(text).to_lowercase()
}

/// Builds the sentence-level corpus and merges duplicate sentences within
/// each sample (across both answers). A merged sentence keeps the position
/// and id of its first occurrence and the union of all duplicates' refs.
pub fn normalize_and_dedupe(samples: &[QuerySample]) -> LabeledCorpus {
    dedupe(&LabeledCorpus::from_samples(samples))
}

/// Merges duplicate sentences of `corpus`. Idempotent.
pub fn dedupe(corpus: &LabeledCorpus) -> LabeledCorpus {
    let mut first: HashMap<(usize, String), usize> = HashMap::new();
    let mut merged: Vec<CorpusSentence> = Vec::with_capacity(corpus.len());
    for s in &corpus.sentences {
        let key = (s.sample, normalized_key(&s.sentence.text));
        match first.get(&key) {
            Some(&at) => {
                let kept = &mut merged[at].sentence;
                kept.refs.extend(s.sentence.refs.iter().copied());
                match (kept.clean_label, s.sentence.clean_label) {
                    (None, Some(label)) => {
                        *kept = kept.clone().with_clean_label(label);
                    }
                    (Some(a), Some(b)) if a != b => {
                        log::warn!(
                            "sample {}: duplicate sentence {:?} labeled both {} and {}; keeping {}",
                            corpus.samples[s.sample].id,
                            kept.text,
                            a.as_str(),
                            b.as_str(),
                            a.as_str()
                        );
                    }
                    _ => {}
                }
                if kept.clean_label.is_none() {
                    kept.ref_class = RefClass::from_ref_count(kept.refs.len());
                }
            }
            None => {
                first.insert(key, merged.len());
                merged.push(s.clone());
            }
        }
    }
    LabeledCorpus::new(corpus.samples.clone(), merged)
}

/// Class of a sentence: its cleaned label when one is given (with `invalid`
/// mapped to `Zero`), otherwise its reference count.
pub fn assign_ref_class(sentence: &LabeledSentence, label: Option<&str>) -> Result<RefClass> {
    match label {
        Some(l) => Ok(CleanLabel::from_str(l)?.ref_class()),
        None => Ok(RefClass::from_ref_count(sentence.refs.len())),
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::corpus::Quote;
    use crate::error::Error;

    fn sample(id: &str, answers: Vec<Vec<(&str, &[u32])>>) -> QuerySample {
        QuerySample {
            id: id.to_string(),
            query: "q".to_string(),
            quotes: (1..=4)
                .map(|i| Quote {
                    index: i,
                    text: format!("quote {i}"),
                })
                .collect(),
            answers: answers
                .into_iter()
                .map(|a| {
                    a.into_iter()
                        .map(|(t, r)| LabeledSentence::from_refs(t, r.iter().copied().collect()))
                        .collect()
                })
                .collect(),
        }
    }

    #[test]
    fn duplicates_merge_with_union_of_refs() {
        let s = sample("a", vec![vec![("Pines are green.", &[1])], vec![("Pines  are green.", &[2])]]);
        let corpus = normalize_and_dedupe(&[s]);
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus.sentences[0].sentence.refs, BTreeSet::from([1, 2]));
        assert_eq!(corpus.sentences[0].sentence.ref_class, RefClass::Multi);
        assert_eq!(corpus.sentences[0].sentence_id, "0.0");
        assert_eq!(corpus.class_counts, [0, 0, 1]);
    }

    #[test]
    fn no_duplicates_unchanged() {
        let s = sample("a", vec![vec![("One.", &[1]), ("Two.", &[]), ("Three.", &[1, 2])]]);
        let corpus = normalize_and_dedupe(&[s]);
        assert_eq!(corpus.len(), 3);
        assert_eq!(corpus.class_counts, [1, 1, 1]);
    }

    #[test]
    fn same_text_in_different_samples_kept() {
        let a = sample("a", vec![vec![("Same.", &[1])]]);
        let b = sample("b", vec![vec![("Same.", &[1])]]);
        assert_eq!(normalize_and_dedupe(&[a, b]).len(), 2);
    }

    #[test]
    fn ref_class_assignment() {
        let none = LabeledSentence::from_refs("x", BTreeSet::new());
        let two = LabeledSentence::from_refs("x", BTreeSet::from([1, 2]));
        let four = LabeledSentence::from_refs("x", BTreeSet::from([1, 2, 3, 4]));
        assert_eq!(assign_ref_class(&none, None).unwrap(), RefClass::Zero);
        assert_eq!(assign_ref_class(&two, None).unwrap(), RefClass::Multi);
        assert_eq!(assign_ref_class(&four, Some("one")).unwrap(), RefClass::One);
        assert_eq!(assign_ref_class(&two, Some("invalid")).unwrap(), RefClass::Zero);
        assert!(matches!(
            assign_ref_class(&two, Some("several")),
            Err(Error::InvalidLabel(_))
        ));
    }
}
