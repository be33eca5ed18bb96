use preattr::features::{count_syllables, tokenize, write_csv, FeatureExtractor, FeatureVector, Lexicons, NgramModel, RATIO_FEATURES};
use preattr::RefClass;
use proptest::prelude::*;
use serde::Deserialize;

#[derive(Deserialize)]
struct Golden {
    text: String,
    words: f64,
    syllables: f64,
    polysyllables: f64,
    letters: f64,
    chars: f64,
    unfamiliar: f64,
    f3: f64,
    f18: f64,
    f19: f64,
    f20: f64,
    f21: f64,
    f22: f64,
    f23: f64,
}

fn extractor(train: &[&str]) -> FeatureExtractor {
    FeatureExtractor::fit(train).unwrap()
}

#[test]
fn readability_matches_golden_file() {
    let fx = extractor(&[]);
    let lex = Lexicons::bundled();
    for line in include_str!("data/readability_golden.jsonl").lines() {
        let g: Golden = serde_json::from_str(line).unwrap();
        let f = fx.extract(&g.text);
        let tok = tokenize(&g.text);
        // Counts first, so a formula mismatch is not hidden by a counting one.
        assert_eq!(f.values[11], g.words, "{}", g.text);
        assert_eq!(f.values[10], g.syllables, "{}", g.text);
        assert_eq!(tok.letters as f64, g.letters, "{}", g.text);
        assert_eq!(tok.chars as f64, g.chars, "{}", g.text);
        let poly = tok.word_tokens.iter().filter(|w| count_syllables(w) >= 3).count() as f64;
        assert_eq!(poly, g.polysyllables, "{}", g.text);
        let unfamiliar = tok
            .word_tokens
            .iter()
            .filter(|w| !lex.is_familiar(&w.to_lowercase()))
            .count() as f64;
        assert_eq!(unfamiliar, g.unfamiliar, "{}", g.text);
        for (i, want) in [(3, g.f3), (18, g.f18), (19, g.f19), (20, g.f20), (21, g.f21), (22, g.f22), (23, g.f23)] {
            assert!(
                (f.values[i] - want).abs() < 1e-9,
                "f{i} of {:?}: {} vs {want}",
                g.text,
                f.values[i]
            );
        }
    }
}

/// Counts vowel groups by splitting on consonants.
fn syllables_by_splitting(word: &str) -> usize {
    let letters: String = word.to_lowercase().chars().filter(|c| c.is_alphabetic()).collect();
    let groups = letters
        .split(|c: char| !"aeiouy".contains(c))
        .filter(|g| !g.is_empty())
        .count();
    let silent = letters.len() >= 2
        && letters.ends_with('e')
        && !"aeiouy".contains(letters.chars().rev().nth(1).unwrap());
    groups.saturating_sub(usize::from(silent)).max(1)
}

#[test]
fn syllable_rule_over_every_lexicon_word() {
    let lex = Lexicons::bundled();
    let mut words: Vec<&String> = lex
        .familiar_words
        .iter()
        .chain(lex.synset_counts.keys())
        .chain(lex.irregular_participles.iter())
        .collect();
    words.sort();
    assert!(words.len() > 10_000);
    for w in words {
        assert_eq!(count_syllables(w), syllables_by_splitting(w), "{w}");
    }
}

#[test]
fn feature_csv_layout() {
    let fx = extractor(&["a b"]);
    let rows = vec![fx.extract("The cat sat."), FeatureVector::degenerate()];
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows, &[RefClass::One, RefClass::Zero]).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(header.len(), 25);
    assert_eq!(header[0], "f0");
    assert_eq!(header[23], "f23");
    assert_eq!(header[24], "label");
    assert!(lines[1].ends_with(",one"));
    assert!(write_csv(&mut Vec::new(), &rows, &[RefClass::One]).is_err());
}

fn check_ranges(f: &FeatureVector) -> Result<(), TestCaseError> {
    prop_assert!(f.check_finite().is_ok());
    for i in RATIO_FEATURES {
        prop_assert!((0.0..=1.0).contains(&f.values[i]), "f{} = {}", i, f.values[i]);
    }
    prop_assert!(f.values[17] == 0.0 || f.values[17] == 1.0);
    for i in [10, 11, 12] {
        prop_assert!(f.values[i] >= 0.0 && f.values[i].fract() == 0.0);
    }
    for i in [13, 14] {
        prop_assert!(f.values[i] > 0.0 && f.values[i] <= 1.0);
    }
    Ok(())
}

fn word() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z]{1,10}",
        "[A-Z][a-z]{0,9}",
        "[0-9]{1,4}",
        "[a-z]{2,5}-[a-z]{2,5}",
        Just("the".to_string()),
        Just("was".to_string()),
        Just("built".to_string()),
        Just("they".to_string()),
        Just("which".to_string()),
    ]
}

fn sentence() -> impl Strategy<Value = String> {
    (
        prop::collection::vec((word(), prop_oneof![Just(""), Just(","), Just(" ("), Just(")"), Just(";")]), 0..25),
        prop_oneof![Just(""), Just("."), Just("?!"), Just("...")],
    )
        .prop_map(|(ws, end)| {
            let mut s: String = ws.iter().map(|(w, p)| format!("{w}{p} ")).collect();
            s.push_str(end);
            s
        })
}

const TRAIN: [&str; 4] = [
    "The tree keeps its leaves.",
    "They were built in 1955.",
    "Which river is the longest?",
    "Paris is the capital of France.",
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn ranges_hold(s in sentence()) {
        let fx = extractor(&TRAIN);
        let f = fx.extract(&s);
        check_ranges(&f)?;
        prop_assert_eq!(f.degenerate, tokenize(&s).is_empty());
    }

    #[test]
    fn extraction_is_deterministic(s in sentence()) {
        let a = extractor(&TRAIN).extract(&s);
        let b = extractor(&TRAIN).extract(&s);
        prop_assert_eq!(a.values.map(f64::to_bits), b.values.map(f64::to_bits));
    }

    #[test]
    fn diversity_is_unique_over_total(s in sentence()) {
        let f = extractor(&TRAIN).extract(&s);
        prop_assert!(f.values[12] <= f.values[11]);
        if f.values[11] > 0.0 {
            prop_assert_eq!(f.values[0], f.values[12] / f.values[11]);
        }
    }

    #[test]
    fn appending_a_new_word_adds_one(s in sentence()) {
        let fx = extractor(&TRAIN);
        let before = fx.extract(&s);
        let after = fx.extract(&format!("{s} zzqxnovel"));
        prop_assert_eq!(after.values[11], before.values[11] + 1.0);
        prop_assert_eq!(after.values[12], before.values[12] + 1.0);
    }

    #[test]
    fn training_ngrams_stay_above_the_floor(
        train in prop::collection::vec(sentence(), 1..8),
        pick in any::<prop::sample::Index>(),
    ) {
        let bi = NgramModel::fit(&train, 2).unwrap();
        let tri = NgramModel::fit(&train, 3).unwrap();
        let s = pick.get(&train);
        for m in [&bi, &tri] {
            let v = m.vocabulary_size() as f64;
            let probs = m.sentence_probabilities(s);
            prop_assert!(!probs.is_empty());
            for p in probs {
                // No context occurs more often than all training n-grams together.
                prop_assert!(p > 0.0);
                prop_assert!(p >= 1.0 / (m.total_count() as f64 + v));
            }
        }
    }
}
