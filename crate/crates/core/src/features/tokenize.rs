/// Word and punctuation tokens of one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedSentence {
    pub word_tokens: Vec<String>,
    pub punct_tokens: Vec<String>,
    /// Characters inside word tokens.
    pub chars_in_words: usize,
    /// Alphabetic characters inside word tokens.
    pub letters: usize,
    /// Non-whitespace characters of the whole sentence (words and punctuation).
    pub chars: usize,
}

impl TokenizedSentence {
    pub fn word_count(&self) -> usize {
        self.word_tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word_tokens.is_empty()
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '\'' | '’' | '-')
}

fn is_joiner(c: char) -> bool {
    matches!(c, '\'' | '’' | '-')
}

/// Splits a sentence into words (maximal runs of letters, digits, apostrophes
/// and hyphens, with leading and trailing apostrophes/hyphens peeled off) and
/// single-character punctuation tokens.
pub fn tokenize(text: &str) -> TokenizedSentence {
    let mut out = TokenizedSentence::default();
    let mut run = String::new();

    let flush = |run: &mut String, out: &mut TokenizedSentence| {
        if run.is_empty() {
            return;
        }
        let core = run.trim_matches(is_joiner);
        if core.is_empty() {
            for c in run.chars() {
                out.punct_tokens.push(c.to_string());
            }
        } else {
            let lead = run.len() - run.trim_start_matches(is_joiner).len();
            let trail_start = lead + core.len();
            for c in run[..lead].chars().chain(run[trail_start..].chars()) {
                out.punct_tokens.push(c.to_string());
            }
            out.chars_in_words += core.chars().count();
            out.letters += core.chars().filter(|c| c.is_alphabetic()).count();
            out.word_tokens.push(core.to_string());
        }
        run.clear();
    };

    for c in text.chars() {
        if is_word_char(c) {
            run.push(c);
            continue;
        }
        flush(&mut run, &mut out);
        if !c.is_whitespace() && !c.is_control() {
            out.punct_tokens.push(c.to_string());
        }
    }
    flush(&mut run, &mut out);
    out.chars = text.chars().filter(|c| !c.is_whitespace()).count();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_sentence() {
        let t = tokenize("The cat sat.");
        assert_eq!(t.word_tokens, ["The", "cat", "sat"]);
        assert_eq!(t.punct_tokens, ["."]);
        assert_eq!(t.chars_in_words, 9);
        assert_eq!(t.letters, 9);
        assert_eq!(t.chars, 10);
    }

    #[test]
    fn hyphenated_word() {
        let t = tokenize("state-of-the-art!");
        assert_eq!(t.word_tokens, ["state-of-the-art"]);
        assert_eq!(t.punct_tokens, ["!"]);
    }

    #[test]
    fn empty_and_blank() {
        assert!(tokenize("").word_tokens.is_empty());
        assert!(tokenize("   \t").punct_tokens.is_empty());
    }

    #[test]
    fn dangling_joiners_are_punctuation() {
        let t = tokenize("'quoted' -- it's");
        assert_eq!(t.word_tokens, ["quoted", "it's"]);
        assert_eq!(t.punct_tokens, ["'", "'", "-", "-"]);
    }
}
