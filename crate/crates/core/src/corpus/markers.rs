//! Citation-marker grammar.
//!
//! Answers in the attribution datasets carry their references inline, in a
//! handful of inconsistent styles:
//!
//! ```text
//! [1]  [1][2]  [1,2]  [1, 2]  [1,2,]  [1 and 2]  [1-2]  (1)  [context 1]
//! ```
//!
//! The grammar accepted inside a marker is closed and regular:
//!
//! ```text
//! list  := item (sep item)* ","?
//! item  := ("context" ws+)? index (ws* ("-" | "–") ws* index)?
//! sep   := ws* "," ws* ("and" ws+)? | ws+ "and" ws+
//! index := [0-9]+            (positive)
//! ```
//!
//! Square-bracket markers are removed wherever they appear. Parenthesised
//! markers are only treated as citations when nothing but punctuation,
//! whitespace or other markers follows them, so "steps (1) and (2)" keeps its
//! numerals. Bracketed spans that do not start like a citation ("[sic]") are
//! left in the text and reported back as unmatched.

use std::collections::BTreeSet;
use std::ops::Range;

use crate::error::MarkerError;

/// Widest range a single `[a-b]` marker may expand to.
const MAX_RANGE_WIDTH: u32 = 1000;

/// A sentence with its citation markers stripped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParsedSentence {
    pub text: String,
    pub refs: BTreeSet<u32>,
    /// Byte spans (in the raw input) of bracketed text that is not a marker.
    pub unmatched: Vec<Range<usize>>,
}

/// Strips every citation marker from `raw` and returns the cleaned sentence
/// together with the union of cited quote indices.
pub fn parse_reference_markers(raw: &str) -> Result<ParsedSentence, MarkerError> {
    let mut removals: Vec<Range<usize>> = Vec::new();
    let mut refs = BTreeSet::new();
    let mut unmatched = Vec::new();
    let mut paren_candidates: Vec<(Range<usize>, BTreeSet<u32>)> = Vec::new();

    for group in bracket_groups(raw) {
        let inner = &raw[group.span.start + 1..group.span.end - 1];
        match group.kind {
            GroupKind::Square => {
                if !looks_like_citation(inner) {
                    unmatched.push(group.span);
                    continue;
                }
                match parse_list(inner) {
                    Ok(set) => {
                        refs.extend(set);
                        removals.push(group.span);
                    }
                    Err(reason) => {
                        return Err(MarkerError {
                            fragment: raw[group.span.clone()].to_string(),
                            span: group.span,
                            reason,
                        })
                    }
                }
            }
            GroupKind::Round => {
                if looks_like_citation(inner) {
                    if let Ok(set) = parse_list(inner) {
                        paren_candidates.push((group.span, set));
                    }
                }
            }
        }
    }

    // Parenthesised markers count only in sentence-final position. Walk from
    // the end so a run like "(1)(2)." is accepted as a whole.
    paren_candidates.sort_by_key(|(span, _)| std::cmp::Reverse(span.start));
    for (span, set) in paren_candidates {
        if only_tail_follows(raw, span.end, &removals) {
            refs.extend(set);
            removals.push(span);
        }
    }

    removals.sort_by_key(|r| r.start);
    Ok(ParsedSentence {
        text: splice_out(raw, &removals),
        refs,
        unmatched,
    })
}

/// Renders `text` with a canonical `[i,j,...]` marker placed before any
/// trailing sentence punctuation.
pub fn render_with_markers(text: &str, refs: &BTreeSet<u32>) -> String {
    if refs.is_empty() {
        return text.to_string();
    }
    let marker = format!(
        "[{}]",
        refs.iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );
    let body = text.trim_end_matches(is_tail_char);
    let tail = &text[body.len()..];
    if body.is_empty() {
        format!("{marker}{tail}")
    } else {
        format!("{body} {marker}{tail}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GroupKind {
    Square,
    Round,
}

#[derive(Debug)]
struct Group {
    kind: GroupKind,
    span: Range<usize>,
}

/// Innermost `[...]` and `(...)` groups, in order of appearance.
fn bracket_groups(raw: &str) -> Vec<Group> {
    let mut groups = Vec::new();
    let mut open: Option<(GroupKind, usize)> = None;
    for (i, c) in raw.char_indices() {
        match c {
            '[' => open = Some((GroupKind::Square, i)),
            '(' => open = Some((GroupKind::Round, i)),
            ']' | ')' => {
                let kind = if c == ']' {
                    GroupKind::Square
                } else {
                    GroupKind::Round
                };
                if let Some((k, start)) = open.take() {
                    if k == kind {
                        groups.push(Group {
                            kind,
                            span: start..i + 1,
                        });
                    }
                }
            }
            _ => {}
        }
    }
    groups
}

fn looks_like_citation(inner: &str) -> bool {
    let t = inner.trim_start();
    t.starts_with(|c: char| c.is_ascii_digit()) || starts_with_keyword(t, "context")
}

fn starts_with_keyword(s: &str, kw: &str) -> bool {
    s.len() >= kw.len() && s.is_char_boundary(kw.len()) && s[..kw.len()].eq_ignore_ascii_case(kw)
}

fn is_tail_char(c: char) -> bool {
    c.is_whitespace() || matches!(c, '.' | '!' | '?' | ';' | ':' | ',' | '"' | '\'' | '”' | '’')
}

fn only_tail_follows(raw: &str, from: usize, removals: &[Range<usize>]) -> bool {
    let mut pos = from;
    let mut sorted: Vec<&Range<usize>> = removals.iter().filter(|r| r.start >= from).collect();
    sorted.sort_by_key(|r| r.start);
    for r in sorted {
        if !raw[pos..r.start].chars().all(is_tail_char) {
            return false;
        }
        pos = r.end;
    }
    raw[pos..].chars().all(is_tail_char)
}

fn is_closing_punct(c: char) -> bool {
    matches!(
        c,
        '.' | ',' | ';' | ':' | '!' | '?' | ')' | ']' | '"' | '\'' | '”' | '’'
    )
}

/// Removes `removals` (sorted, disjoint) from `raw`, joining the remaining
/// pieces without leaving a gap before punctuation, then collapses whitespace.
fn splice_out(raw: &str, removals: &[Range<usize>]) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pos = 0;
    let mut pending_join = false;
    for r in removals.iter().chain(std::iter::once(&(raw.len()..raw.len()))) {
        let piece = &raw[pos..r.start];
        if pending_join {
            let piece = piece.trim_start();
            if !piece.is_empty() {
                let glue = !out.is_empty() && !piece.starts_with(is_closing_punct);
                if glue {
                    out.push(' ');
                }
                out.push_str(piece);
                pending_join = false;
            }
        } else {
            out.push_str(piece);
        }
        if r.end > r.start {
            let trimmed = out.trim_end().len();
            out.truncate(trimmed);
            pending_join = true;
        }
        pos = r.end;
    }
    collapse_whitespace(&out)
}

pub(crate) fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

struct ListParser<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> ListParser<'a> {
    fn rest(&self) -> &'a str {
        &self.s[self.pos..]
    }

    fn skip_ws(&mut self) -> usize {
        let rest = self.rest();
        let n = rest.len() - rest.trim_start().len();
        self.pos += n;
        n
    }

    fn eat(&mut self, c: char) -> bool {
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    /// Consumes `kw` if it is followed by whitespace.
    fn eat_keyword(&mut self, kw: &str) -> bool {
        let rest = self.rest();
        if starts_with_keyword(rest, kw) && rest[kw.len()..].starts_with(char::is_whitespace) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn index(&mut self) -> Result<u32, String> {
        let digits: &str = {
            let rest = self.rest();
            let end = rest
                .find(|c: char| !c.is_ascii_digit())
                .unwrap_or(rest.len());
            &rest[..end]
        };
        if digits.is_empty() {
            return Err(match self.rest().chars().next() {
                Some(c) => format!("expected an index, found {c:?}"),
                None => "expected an index, found end of marker".to_string(),
            });
        }
        self.pos += digits.len();
        let value: u32 = digits
            .parse()
            .map_err(|_| format!("index {digits} out of range"))?;
        if value == 0 {
            return Err("quote indices start at 1".to_string());
        }
        Ok(value)
    }

    fn item(&mut self, out: &mut BTreeSet<u32>) -> Result<(), String> {
        if self.eat_keyword("context") {
            self.skip_ws();
        }
        let first = self.index()?;
        let save = self.pos;
        self.skip_ws();
        if self.eat('-') || self.eat('–') {
            self.skip_ws();
            let last = self.index()?;
            if last < first {
                return Err(format!("descending range {first}-{last}"));
            }
            if last - first >= MAX_RANGE_WIDTH {
                return Err(format!("range {first}-{last} is too wide"));
            }
            out.extend(first..=last);
        } else {
            self.pos = save;
            out.insert(first);
        }
        Ok(())
    }

    fn list(mut self) -> Result<BTreeSet<u32>, String> {
        let mut out = BTreeSet::new();
        self.skip_ws();
        self.item(&mut out)?;
        loop {
            let ws = self.skip_ws();
            if self.rest().is_empty() {
                return Ok(out);
            }
            if self.eat(',') {
                self.skip_ws();
                if self.rest().is_empty() {
                    return Ok(out); // trailing comma
                }
                if self.eat_keyword("and") {
                    self.skip_ws();
                }
            } else if ws > 0 && self.eat_keyword("and") {
                self.skip_ws();
            } else {
                let c = self.rest().chars().next().unwrap_or(' ');
                return Err(format!("unexpected {c:?}"));
            }
            self.item(&mut out)?;
        }
    }
}

fn parse_list(inner: &str) -> Result<BTreeSet<u32>, String> {
    ListParser { s: inner, pos: 0 }.list()
}
