use std::collections::{BTreeSet, HashMap};

use preattr::corpus::{dedupe, normalized_key, LabeledCorpus};
use preattr::{
    load_samples, normalize_and_dedupe, stratified_split, CleanLabel, LabeledSentence, QuerySample,
    Quote, RefClass, Schema,
};
use proptest::prelude::*;

fn sentence() -> impl Strategy<Value = LabeledSentence> {
    (
        prop_oneof![Just("Pines are green."), Just("pines  are GREEN."), Just("Firs grow."), Just("It rains.")],
        prop::collection::btree_set(1u32..5, 0..3),
        prop::option::weighted(0.2, prop_oneof![Just(CleanLabel::One), Just(CleanLabel::Invalid)]),
    )
        .prop_map(|(t, refs, label)| {
            let s = LabeledSentence::from_refs(t, refs);
            match label {
                Some(l) => s.with_clean_label(l),
                None => s,
            }
        })
}

fn samples() -> impl Strategy<Value = Vec<QuerySample>> {
    prop::collection::vec(prop::collection::vec(prop::collection::vec(sentence(), 0..5), 1..3), 1..5).prop_map(|ss| {
        ss.into_iter()
            .enumerate()
            .map(|(i, answers)| QuerySample {
                id: format!("q{i}"),
                query: "Which trees stay green?".into(),
                quotes: (1..5).map(|k| Quote { index: k, text: format!("Quote {k}.") }).collect(),
                answers,
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn dedupe_is_idempotent(s in samples()) {
        let once = normalize_and_dedupe(&s);
        prop_assert_eq!(dedupe(&once), once);
    }

    #[test]
    fn dedupe_unions_refs_per_sample_key(s in samples()) {
        let merged = normalize_and_dedupe(&s);
        let mut want: HashMap<(usize, String), BTreeSet<u32>> = HashMap::new();
        for (i, sample) in s.iter().enumerate() {
            for sent in sample.answers.iter().flatten() {
                want.entry((i, normalized_key(&sent.text))).or_default().extend(&sent.refs);
            }
        }
        prop_assert_eq!(merged.len(), want.len());
        for cs in &merged.sentences {
            let key = (cs.sample, normalized_key(&cs.sentence.text));
            prop_assert_eq!(&cs.sentence.refs, &want[&key]);
            if cs.sentence.clean_label.is_none() {
                prop_assert_eq!(cs.sentence.ref_class, RefClass::from_ref_count(cs.sentence.refs.len()));
            }
        }
    }

    #[test]
    fn split_partitions_and_keeps_ratios(counts in prop::array::uniform3(2usize..60), frac in 0.1f64..0.9, seed in any::<u64>()) {
        let mut sentences = Vec::new();
        for class in RefClass::ALL {
            for i in 0..counts[class.index()] {
                let refs: BTreeSet<u32> = (1..=class.index() as u32 + usize::from(class == RefClass::Multi) as u32).collect();
                sentences.push(preattr::corpus::CorpusSentence {
                    sample: 0,
                    sentence_id: format!("{}.{i}", class.index()),
                    sentence: LabeledSentence::from_refs(format!("s {class} {i}"), refs),
                });
            }
        }
        let corpus = LabeledCorpus::new(Default::default(), sentences);
        prop_assert_eq!(corpus.class_counts, counts);
        let (train, test) = stratified_split(&corpus, frac, seed).unwrap();
        prop_assert_eq!(train.len() + test.len(), corpus.len());
        let mut ids: Vec<&str> = train.sentences.iter().chain(&test.sentences).map(|s| s.sentence_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids.len(), corpus.len());
        for (c, &n) in counts.iter().enumerate() {
            let ideal = frac * n as f64;
            prop_assert!((train.class_counts[c] as f64 - ideal).abs() <= 1.0);
            prop_assert!(test.class_counts[c] >= 1 && train.class_counts[c] >= 1);
        }
    }
}

#[test]
fn loads_cleans_and_counts_a_raw_dump() {
    let dump = r#"
{"query_id": 1, "query": "What is an evergreen?", "quotes": [{"idx": 1, "text": "Evergreens keep leaves."}, {"idx": 2, "text": "Pines are evergreens."}], "answers": [{"answer": "Evergreens keep their leaves all year [1]. Pines are an example [1][2]. Pines are an example [2]. Hope this helps!"}, {"answer": "An evergreen keeps leaves [1, 2]."}]}
{"query_id": 2, "query": "Why is the sky blue?", "quotes": ["Rayleigh scattering.", "Blue light scatters more."], "answers": [["Blue light scatters more [2].", "That is Rayleigh scattering [1 and 2]."]]}
"#;
    let loaded = load_samples(dump.as_bytes(), Schema::Hagrid).unwrap();
    assert!(loaded.warnings.is_empty(), "{:?}", loaded.warnings);
    assert_eq!(loaded.samples.len(), 2);
    let raw = LabeledCorpus::from_samples(&loaded.samples);
    assert_eq!(raw.len(), 7);
    assert_eq!(raw.class_counts, [1, 3, 3]);
    let clean = normalize_and_dedupe(&loaded.samples);
    assert_eq!(clean.len(), 6);
    assert_eq!(clean.class_counts, [1, 2, 3]);
    let merged = clean.sentences.iter().find(|s| s.sentence.text == "Pines are an example.").unwrap();
    assert_eq!(merged.sentence.refs, [1, 2].into());
    assert_eq!(merged.sentence_id, "0.1");

    let mut out = Vec::new();
    clean.write_cleaned_jsonl(&mut out).unwrap();
    let first: serde_json::Value = serde_json::from_str(std::str::from_utf8(&out).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(first["sample_id"], "1");
    assert_eq!(first["label"], "one");
}

#[test]
fn over_referenced_sentence_is_relabeled() {
    let s = LabeledSentence::from_refs("Oxygen is 21% of air.", [1, 2, 3, 4].into());
    assert_eq!(s.ref_class, RefClass::Multi);
    assert_eq!(preattr::assign_ref_class(&s, Some("one")).unwrap(), RefClass::One);
    assert_eq!(preattr::assign_ref_class(&s, Some("invalid")).unwrap(), RefClass::Zero);
    assert!(preattr::assign_ref_class(&s, Some("several")).is_err());
}
