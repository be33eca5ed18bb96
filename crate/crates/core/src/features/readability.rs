//! Readability formulas evaluated on a single sentence.

/// Counts the readability formulas are built from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TextCounts {
    pub sentences: f64,
    pub words: f64,
    pub syllables: f64,
    /// Alphabetic characters.
    pub letters: f64,
    /// Non-whitespace characters.
    pub chars: f64,
    /// Words of three or more syllables.
    pub polysyllables: f64,
    /// Words missing from the Dale–Chall familiar list.
    pub unfamiliar: f64,
}

/// `206.835 - 1.015 W/S - 84.6 Syl/W`
pub fn flesch_reading_ease(c: &TextCounts) -> f64 {
    206.835 - 1.015 * (c.words / c.sentences) - 84.6 * (c.syllables / c.words)
}

/// `1.0430 sqrt(poly * 30 / S) + 3.1291`
pub fn smog(c: &TextCounts) -> f64 {
    1.0430 * (c.polysyllables * 30.0 / c.sentences).sqrt() + 3.1291
}

/// `0.0588 L - 0.296 S - 15.8`, with L and S per 100 words.
pub fn coleman_liau(c: &TextCounts) -> f64 {
    let l = c.letters / c.words * 100.0;
    let s = c.sentences / c.words * 100.0;
    0.0588 * l - 0.296 * s - 15.8
}

/// `4.71 chars/W + 0.5 W/S - 21.43`
pub fn automated_readability(c: &TextCounts) -> f64 {
    4.71 * (c.chars / c.words) + 0.5 * (c.words / c.sentences) - 21.43
}

/// `0.1579 PDW + 0.0496 W/S`, plus 3.6365 when more than 5% of words are unfamiliar.
pub fn dale_chall(c: &TextCounts) -> f64 {
    let pdw = 100.0 * c.unfamiliar / c.words;
    let raw = 0.1579 * pdw + 0.0496 * (c.words / c.sentences);
    if pdw > 5.0 {
        raw + 3.6365
    } else {
        raw
    }
}

/// Easy words (under three syllables) score 1, hard words 3; the sum over
/// sentences `r` maps to `r / 2` when above 20 and `(r - 2) / 2` otherwise.
pub fn linsear_write(c: &TextCounts) -> f64 {
    let hard = c.polysyllables;
    let easy = c.words - hard;
    let r = (easy + 3.0 * hard) / c.sentences;
    if r > 20.0 {
        r / 2.0
    } else {
        (r - 2.0) / 2.0
    }
}

/// `0.4 (W/S + 100 complex/W)`, complex meaning three or more syllables.
pub fn gunning_fog(c: &TextCounts) -> f64 {
    0.4 * (c.words / c.sentences + 100.0 * c.polysyllables / c.words)
}
