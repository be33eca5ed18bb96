//! Vowel-group syllable estimate.

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Number of vowel groups (`a e i o u y`), minus one for a silent final `e`
/// that stands alone after a consonant, never less than 1.
pub fn count_syllables(word: &str) -> usize {
    let lower: Vec<char> = word.to_lowercase().chars().filter(|c| c.is_alphabetic()).collect();
    let mut groups = 0usize;
    let mut prev_vowel = false;
    for &c in &lower {
        let v = is_vowel(c);
        if v && !prev_vowel {
            groups += 1;
        }
        prev_vowel = v;
    }
    let n = lower.len();
    if n >= 2 && lower[n - 1] == 'e' && !is_vowel(lower[n - 2]) {
        groups = groups.saturating_sub(1);
    }
    groups.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(count_syllables("cat"), 1);
        assert_eq!(count_syllables("because"), 2);
        assert_eq!(count_syllables("rhythm"), 1);
        assert_eq!(count_syllables("the"), 1);
        assert_eq!(count_syllables("1955"), 1);
        assert_eq!(count_syllables("Beautiful"), 3);
        assert_eq!(count_syllables("tree"), 1);
    }
}
