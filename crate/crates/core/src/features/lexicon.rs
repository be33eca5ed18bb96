//! Word lists used by the feature extractor.
//!
//! Each list is a UTF-8 file with one entry per line; the synset table has
//! `lemma<TAB>count` lines. Lines starting with `#` are comments, and a
//! `# lexicon: <name> <version>` header names the list version. The default
//! lists are compiled into the crate; [`Lexicons::from_dir`] loads
//! replacements with the same file names.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

pub const STOPWORDS_FILE: &str = "stopwords.txt";
pub const PRONOUNS_FILE: &str = "pronouns.txt";
pub const PARTICIPLES_FILE: &str = "irregular_participles.txt";
pub const FAMILIAR_FILE: &str = "dale_chall.txt";
pub const SYNSETS_FILE: &str = "synset_counts.tsv";

const BUNDLED: [(&str, &str); 5] = [
    (STOPWORDS_FILE, include_str!("../../data/stopwords.txt")),
    (PRONOUNS_FILE, include_str!("../../data/pronouns.txt")),
    (PARTICIPLES_FILE, include_str!("../../data/irregular_participles.txt")),
    (FAMILIAR_FILE, include_str!("../../data/dale_chall.txt")),
    (SYNSETS_FILE, include_str!("../../data/synset_counts.tsv")),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicons {
    pub stopwords: HashSet<String>,
    pub pronouns: HashSet<String>,
    pub irregular_participles: HashSet<String>,
    /// Dale–Chall familiar words.
    pub familiar_words: HashSet<String>,
    /// Sense counts per lemma.
    pub synset_counts: HashMap<String, u32>,
    version: String,
}

impl Lexicons {
    /// The compiled-in lists, parsed once per process.
    pub fn bundled() -> Arc<Lexicons> {
        static BUNDLED_LEXICONS: OnceLock<Arc<Lexicons>> = OnceLock::new();
        BUNDLED_LEXICONS
            .get_or_init(|| {
                let sources: HashMap<&str, String> =
                    BUNDLED.iter().map(|(n, s)| (*n, s.to_string())).collect();
                Arc::new(Self::parse(&sources).expect("bundled lexicons are well-formed"))
            })
            .clone()
    }

    /// Loads all five lists from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Lexicons> {
        let mut sources = HashMap::new();
        for (name, _) in BUNDLED {
            let path = dir.join(name);
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            sources.insert(name, text);
        }
        Self::parse(&sources)
    }

    /// Writes the bundled lists into `dir` (for inspection or editing).
    pub fn write_bundled(dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, text) in BUNDLED {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }

    fn parse(sources: &HashMap<&str, String>) -> Result<Lexicons> {
        let mut versions = Vec::new();
        let mut list = |name: &str| -> HashSet<String> {
            let (entries, version) = entries(&sources[name]);
            versions.push(version.unwrap_or_else(|| format!("{name} unversioned")));
            entries.map(|e| e.to_lowercase()).collect()
        };
        let stopwords = list(STOPWORDS_FILE);
        let pronouns = list(PRONOUNS_FILE);
        let irregular_participles = list(PARTICIPLES_FILE);
        let familiar_words = list(FAMILIAR_FILE);

        let (lines, version) = entries(&sources[SYNSETS_FILE]);
        versions.push(version.unwrap_or_else(|| format!("{SYNSETS_FILE} unversioned")));
        let mut synset_counts = HashMap::new();
        for (i, line) in lines.enumerate() {
            let (lemma, count) = line.split_once('\t').ok_or_else(|| Error::Schema {
                record: i,
                message: format!("{SYNSETS_FILE}: expected lemma<TAB>count"),
            })?;
            let count: u32 = count.trim().parse().map_err(|_| Error::Schema {
                record: i,
                message: format!("{SYNSETS_FILE}: bad count {count:?}"),
            })?;
            synset_counts.insert(lemma.trim().to_lowercase(), count);
        }

        Ok(Lexicons {
            stopwords,
            pronouns,
            irregular_participles,
            familiar_words,
            synset_counts,
            version: versions.join("; "),
        })
    }

    /// Versions of the loaded lists, for run manifests.
    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn is_stopword(&self, lower: &str) -> bool {
        self.stopwords.contains(lower)
    }

    pub fn is_pronoun(&self, lower: &str) -> bool {
        self.pronouns.contains(lower)
    }

    pub fn is_familiar(&self, lower: &str) -> bool {
        self.familiar_words.contains(lower)
    }

    /// Sense count of `lower` or of a crude lemma of it; 1 when unknown.
    pub fn synsets(&self, lower: &str) -> u32 {
        lemma_candidates(lower)
            .find_map(|c| self.synset_counts.get(&c).copied())
            .unwrap_or(1)
    }
}

/// Non-comment entries and the version named in the header, if any.
fn entries(text: &str) -> (impl Iterator<Item = &str>, Option<String>) {
    let version = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix('#'))
        .find_map(|l| l.trim().strip_prefix("lexicon:"))
        .map(|v| {
            let mut parts = v.split_whitespace();
            let name = parts.next().unwrap_or("");
            let ver = parts.next().unwrap_or("");
            format!("{name} {ver}")
        });
    let it = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
    (it, version)
}

fn lemma_candidates(word: &str) -> impl Iterator<Item = String> + '_ {
    let mut out = vec![word.to_string()];
    let strip = |suffix: &str, add: &str| {
        word.strip_suffix(suffix)
            .filter(|stem| stem.len() >= 2)
            .map(|stem| format!("{stem}{add}"))
    };
    out.extend(
        [
            strip("ies", "y"),
            strip("es", ""),
            strip("s", ""),
            strip("ied", "y"),
            strip("ed", ""),
            strip("ed", "e"),
            strip("d", ""),
            strip("ing", ""),
            strip("ing", "e"),
        ]
        .into_iter()
        .flatten(),
    );
    out.into_iter()
}
