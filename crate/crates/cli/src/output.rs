//! Output directory bookkeeping and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::PipelineConfig;

pub const CONFIG_FILE: &str = "config.toml";
pub const MANIFEST_FILE: &str = "manifest.json";

pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

/// Size of the corpus a command worked on.
#[derive(Serialize, Clone, Copy)]
pub struct CorpusStats {
    pub samples: usize,
    pub sentences: usize,
    /// Zero, One, Multi.
    pub class_counts: [usize; 3],
}

#[derive(Serialize)]
struct Seeds {
    eval: u64,
    forest: u64,
    synthetic: u64,
}

/// Everything needed to reproduce a run. Contains no timestamps or absolute
/// paths so identical runs produce identical manifests.
#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    dataset: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    corpus: Option<CorpusStats>,
    seeds: Seeds,
    provider: Option<&'a str>,
    lexicon_version: &'a str,
    config: &'static str,
    warnings: usize,
    outputs: &'a [String],
}

pub struct RunInfo<'a> {
    pub command: &'a str,
    pub dataset: Option<&'a str>,
    pub corpus: Option<CorpusStats>,
    pub provider: Option<&'a str>,
    pub lexicon_version: &'a str,
    pub warnings: usize,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(OutDir {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        Ok(path)
    }

    /// Writes the effective configuration and the manifest.
    pub fn finish(mut self, config: &PipelineConfig, info: RunInfo<'_>) -> Result<()> {
        self.write(CONFIG_FILE, config.to_toml()?)?;
        let mut outputs = self.written.clone();
        outputs.sort();
        let manifest = Manifest {
            tool: "preattr",
            version: preattr::VERSION,
            command: info.command,
            dataset: info.dataset,
            corpus: info.corpus,
            seeds: Seeds {
                eval: config.eval.seed,
                forest: config.forest.seed,
                synthetic: config.synthetic.seed,
            },
            provider: info.provider,
            lexicon_version: info.lexicon_version,
            config: CONFIG_FILE,
            warnings: info.warnings,
            outputs: &outputs,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        self.write(MANIFEST_FILE, text)?;
        Ok(())
    }
}
