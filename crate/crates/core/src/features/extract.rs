use std::collections::HashMap;

use super::lexicon::Lexicons;
use super::ngram::NgramModel;
use super::pos::{self, Pos, BE_FORMS};
use super::readability::{self as rd, TextCounts};
use super::syllables::count_syllables;
use super::tokenize::tokenize;
use super::{FeatureVector, FEATURE_COUNT};

const SUBORDINATORS: &[&str] = &[
    "that", "which", "who", "because", "although", "while", "if", "when",
];

const MAX_CLAUSE_DEPTH: f64 = 6.0;

fn is_capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

/// Capitalized and not first, or first and followed by another capitalized word.
fn entity_flags(words: &[String]) -> Vec<bool> {
    (0..words.len())
        .map(|i| {
            if i == 0 {
                is_capitalized(&words[0]) && words.get(1).is_some_and(|w| is_capitalized(w))
            } else {
                is_capitalized(&words[i])
            }
        })
        .collect()
}

fn bracket_depth(text: &str) -> usize {
    let (mut depth, mut max) = (0usize, 0usize);
    for c in text.chars() {
        match c {
            '(' | '[' | '{' => {
                depth += 1;
                max = max.max(depth);
            }
            ')' | ']' | '}' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    max
}

fn entropy_bits(lower: &[String]) -> f64 {
    let mut freq: HashMap<&str, usize> = HashMap::new();
    for w in lower {
        *freq.entry(w).or_default() += 1;
    }
    let n = lower.len() as f64;
    let mut counts: Vec<usize> = freq.into_values().collect();
    counts.sort_unstable();
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

fn is_participle(lower: &str, lex: &Lexicons) -> bool {
    lex.irregular_participles.contains(lower) || lower.ends_with("ed") || lower.ends_with("en")
}

/// Be-forms followed within two tokens by a participle.
fn passive_count(lower: &[String], lex: &Lexicons) -> usize {
    (0..lower.len())
        .filter(|&i| BE_FORMS[..7].contains(&lower[i].as_str()))
        .filter(|&i| {
            lower[i + 1..]
                .iter()
                .take(2)
                .any(|w| is_participle(w, lex))
        })
        .count()
}

pub fn extract_text(
    text: &str,
    bigram: &NgramModel,
    trigram: &NgramModel,
    lex: &Lexicons,
) -> FeatureVector {
    let tok = tokenize(text);
    if tok.is_empty() {
        return FeatureVector::degenerate();
    }
    let words = &tok.word_tokens;
    let lower: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
    let n = words.len() as f64;

    let mut unique: Vec<&str> = lower.iter().map(String::as_str).collect();
    unique.sort_unstable();
    unique.dedup();
    let unique = unique.len() as f64;

    let syllables: Vec<usize> = words.iter().map(|w| count_syllables(w)).collect();
    let total_syllables = syllables.iter().sum::<usize>() as f64;
    let polysyllables = syllables.iter().filter(|&&s| s >= 3).count() as f64;

    let entities = entity_flags(words);
    let entity_count = entities.iter().filter(|&&e| e).count() as f64;
    let stop: Vec<bool> = lower.iter().map(|w| lex.is_stopword(w)).collect();
    let stop_count = stop.iter().filter(|&&s| s).count() as f64;
    let content: Vec<bool> = entities
        .iter()
        .zip(&stop)
        .filter(|(_, &s)| !s)
        .map(|(&e, _)| e)
        .collect();
    let all_entities = !content.is_empty() && content.iter().all(|&e| e);

    let subordinators = lower
        .iter()
        .filter(|w| SUBORDINATORS.contains(&w.as_str()))
        .count();
    let clause_depth = (1 + bracket_depth(text) + subordinators) as f64;

    let synsets: u64 = lower.iter().map(|w| u64::from(lex.synsets(w))).sum();

    let tags = pos::tag(words, lex);
    let nouns = tags.iter().filter(|&&t| t == Pos::Noun).count() as f64;
    let verbs = tags.iter().filter(|&&t| t == Pos::Verb).count();

    let pronouns = lower.iter().filter(|w| lex.is_pronoun(w)).count() as f64;
    let passive = passive_count(&lower, lex) as f64;

    let counts = TextCounts {
        sentences: 1.0,
        words: n,
        syllables: total_syllables,
        letters: tok.letters as f64,
        chars: tok.chars as f64,
        polysyllables,
        unfamiliar: lower.iter().filter(|w| !lex.is_familiar(w)).count() as f64,
    };

    let mut v = [0.0; FEATURE_COUNT];
    v[0] = unique / n;
    v[1] = entity_count / n;
    v[2] = clause_depth.min(MAX_CLAUSE_DEPTH);
    v[3] = rd::flesch_reading_ease(&counts);
    v[4] = entropy_bits(&lower);
    v[5] = synsets as f64 / n;
    v[6] = (nouns + 1.0) / (verbs as f64 + 1.0);
    v[7] = stop_count / n;
    v[8] = (tok.punct_tokens.len() as f64 / n).min(1.0);
    v[9] = tok.chars as f64 / n;
    v[10] = total_syllables;
    v[11] = n;
    v[12] = unique;
    v[13] = bigram.mean_probability(text);
    v[14] = trigram.mean_probability(text);
    v[15] = pronouns / n;
    v[16] = (passive / verbs.max(1) as f64).min(1.0);
    v[17] = if all_entities { 1.0 } else { 0.0 };
    v[18] = rd::smog(&counts);
    v[19] = rd::coleman_liau(&counts);
    v[20] = rd::automated_readability(&counts);
    v[21] = rd::dale_chall(&counts);
    v[22] = rd::linsear_write(&counts);
    v[23] = rd::gunning_fog(&counts);
    FeatureVector {
        values: v,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn features(text: &str) -> FeatureVector {
        let empty: [&str; 0] = [];
        let bi = NgramModel::fit(&empty, 2).unwrap();
        let tri = NgramModel::fit(&empty, 3).unwrap();
        extract_text(text, &bi, &tri, &Lexicons::bundled())
    }

    #[test]
    fn the_cat_sat_counts() {
        let f = features("The cat sat.");
        assert_eq!(f.values[11], 3.0);
        assert_eq!(f.values[12], 3.0);
        assert_eq!(f.values[0], 1.0);
        assert_eq!(f.values[9], 10.0 / 3.0);
    }

    #[test]
    fn the_cat_sat_flesch() {
        let f = features("The cat sat.");
        assert!((f.values[3] - 119.19).abs() < 1e-9, "{}", f.values[3]);
    }

    #[test]
    fn single_word_entropy_is_zero() {
        assert_eq!(features("a a a a").values[4], 0.0);
    }

    #[test]
    fn capitalized_places_are_entities() {
        let f = features("Paris is in France.");
        assert!(f.values[1] > 0.0);
        assert_eq!(f.values[1], 0.25);
        let g = features("New York is in America.");
        assert_eq!(g.values[1], 0.6);
    }

    #[test]
    fn entity_sentence_indicator() {
        assert_eq!(features("Barack Obama in Paris.").values[17], 1.0);
        assert_eq!(features("The cat sat.").values[17], 0.0);
        assert_eq!(features("the and of").values[17], 0.0);
    }

    #[test]
    fn degenerate_sentence() {
        let f = features(" ... !! ");
        assert!(f.degenerate);
        assert_eq!(f.values[13], 1.0);
        assert_eq!(f.values[3], 0.0);
    }

    #[test]
    fn clause_depth_is_capped() {
        assert_eq!(features("The cat sat.").values[2], 1.0);
        assert_eq!(features("He said that it was (mostly) fine.").values[2], 3.0);
        let long = "if if if if if if if if the cat";
        assert_eq!(features(long).values[2], 6.0);
    }

    #[test]
    fn passive_voice() {
        let f = features("The house was built by workers.");
        assert!(f.values[16] > 0.0);
        assert_eq!(features("The cat sat.").values[16], 0.0);
    }

    #[test]
    fn punctuation_ratio_bounded() {
        assert_eq!(features("Wow!!!!").values[8], 1.0);
    }
}
