//! Rule-and-lexicon part-of-speech tagger.
//!
//! Closed-class words come from fixed lists; open-class words are decided
//! by the previous tag and then by suffix, defaulting to noun.

use super::lexicon::Lexicons;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pos {
    Noun,
    Verb,
    Adjective,
    Adverb,
    Pronoun,
    Determiner,
    Preposition,
    Conjunction,
    Number,
}

pub const BE_FORMS: &[&str] = &["is", "are", "was", "were", "been", "being", "be", "am"];

const AUXILIARIES: &[&str] = &[
    "has", "have", "had", "having", "do", "does", "did", "can", "could", "will", "would", "shall",
    "should", "may", "might", "must",
];

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "every", "each", "some", "any", "no", "all", "both", "another", "such",
    "many", "much", "several", "few", "either", "neither", "most", "more", "less",
];

const PREPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "by", "for", "with", "about", "against", "between", "into", "through",
    "during", "before", "after", "above", "below", "to", "from", "up", "down", "over", "under",
    "among", "around", "across", "along", "behind", "beyond", "near", "onto", "toward", "towards",
    "upon", "within", "without", "via", "per", "like", "than", "despite", "throughout",
];

const CONJUNCTIONS: &[&str] = &[
    "and", "or", "but", "nor", "yet", "so", "because", "although", "though", "while", "if",
    "unless", "whereas", "since", "when", "whether",
];

const ADVERBS: &[&str] = &[
    "not", "very", "also", "often", "never", "always", "too", "then", "there", "here", "now",
    "just", "only", "even", "still", "already", "again", "ever", "soon", "however", "sometimes",
    "usually", "perhaps", "quite", "rather", "almost", "well",
];

const SUBJECT_PRONOUNS: &[&str] = &["i", "you", "he", "she", "it", "we", "they"];

const COMMON_VERBS: &[&str] = &[
    "make", "take", "give", "use", "include", "know", "get", "go", "see", "come", "think", "look",
    "want", "find", "tell", "ask", "work", "seem", "feel", "try", "leave", "call", "keep", "let",
    "begin", "help", "show", "hear", "play", "run", "move", "live", "believe", "bring", "happen",
    "write", "provide", "sit", "stand", "lose", "pay", "meet", "lead", "understand", "continue",
    "learn", "change", "allow", "add", "spend", "grow", "open", "walk", "win", "offer", "remember",
    "consider", "appear", "buy", "wait", "serve", "die", "send", "expect", "build", "stay",
    "fall", "cut", "reach", "kill", "remain", "suggest", "raise", "pass", "sell", "require",
    "report", "decide", "pull", "contain", "produce", "cause", "refer", "mean", "become", "say",
    "occur", "exist", "represent", "describe", "involve", "reduce", "increase", "affect",
    "support", "create", "develop", "receive", "protect", "prevent", "form", "depend", "consist",
];

const NOUN_SUFFIXES: &[&str] = &[
    "tion", "sion", "ment", "ness", "ity", "ism", "ist", "ance", "ence", "ship", "hood", "age",
    "ery", "dom", "er", "or",
];

const ADJECTIVE_SUFFIXES: &[&str] = &[
    "ous", "ful", "able", "ible", "ive", "al", "ic", "less", "ish", "ary", "ant", "ent",
];

const VERB_SUFFIXES: &[&str] = &["ize", "ise", "ify", "ate"];

fn is_capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

fn is_common_verb(lower: &str) -> bool {
    COMMON_VERBS.contains(&lower)
        || lower
            .strip_suffix("es")
            .is_some_and(|s| COMMON_VERBS.contains(&s))
        || lower
            .strip_suffix('s')
            .is_some_and(|s| COMMON_VERBS.contains(&s))
}

fn ends_with_any(word: &str, suffixes: &[&str]) -> bool {
    suffixes
        .iter()
        .any(|s| word.len() > s.len() + 2 && word.ends_with(s))
}

/// Tags every word of a sentence.
pub fn tag(words: &[String], lex: &Lexicons) -> Vec<Pos> {
    let mut tags: Vec<Pos> = Vec::with_capacity(words.len());
    for (i, word) in words.iter().enumerate() {
        let lower = word.to_lowercase();
        let w = lower.as_str();
        let prev = tags.last().copied();
        let prev_word = i.checked_sub(1).map(|j| words[j].to_lowercase());
        let prev_word = prev_word.as_deref();

        let t = if w.chars().all(|c| c.is_ascii_digit() || c == '-' || c == '\'') {
            Pos::Number
        } else if BE_FORMS.contains(&w) || AUXILIARIES.contains(&w) {
            Pos::Verb
        } else if DETERMINERS.contains(&w) {
            Pos::Determiner
        } else if lex.is_pronoun(w) {
            Pos::Pronoun
        } else if PREPOSITIONS.contains(&w) {
            Pos::Preposition
        } else if CONJUNCTIONS.contains(&w) {
            Pos::Conjunction
        } else if ADVERBS.contains(&w) || (w.len() > 4 && w.ends_with("ly")) {
            Pos::Adverb
        } else if i > 0 && is_capitalized(word) {
            Pos::Noun
        } else if matches!(prev, Some(Pos::Determiner) | Some(Pos::Adjective)) {
            if ends_with_any(w, ADJECTIVE_SUFFIXES) {
                Pos::Adjective
            } else {
                Pos::Noun
            }
        } else if prev_word == Some("to")
            || AUXILIARIES.contains(&prev_word.unwrap_or(""))
            || SUBJECT_PRONOUNS.contains(&prev_word.unwrap_or(""))
            || is_common_verb(w)
            || lex.irregular_participles.contains(w)
            || ends_with_any(w, VERB_SUFFIXES)
            || (w.len() > 4 && (w.ends_with("ed") || w.ends_with("ing")))
            || (prev_word.is_some_and(|p| BE_FORMS.contains(&p)) && w.ends_with("ed"))
        {
            Pos::Verb
        } else if ends_with_any(w, NOUN_SUFFIXES) {
            Pos::Noun
        } else if ends_with_any(w, ADJECTIVE_SUFFIXES) {
            Pos::Adjective
        } else {
            Pos::Noun
        };
        tags.push(t);
    }
    tags
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(s: &str) -> Vec<Pos> {
        let words: Vec<String> = s.split_whitespace().map(String::from).collect();
        tag(&words, &Lexicons::bundled())
    }

    #[test]
    fn simple_clause() {
        use Pos::*;
        assert_eq!(tags("The cat sat"), [Determiner, Noun, Verb]);
        assert_eq!(tags("They grow quickly"), [Pronoun, Verb, Adverb]);
        assert_eq!(
            tags("The house was built in 1955"),
            [Determiner, Noun, Verb, Verb, Preposition, Number]
        );
    }

    #[test]
    fn be_forms_are_verbs() {
        for w in BE_FORMS {
            assert_eq!(tags(&format!("it {w}"))[1], Pos::Verb);
        }
    }
}
