//! Pipeline configuration: a TOML file with one table per stage, overridable
//! through `ATTRIB_<SECTION>_<KEY>` environment variables.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use preattr::eval::SyntheticConfig;
use preattr::forest::ForestParams;
use preattr::{HttpEmbedderConfig, Schema};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

pub const ENV_PREFIX: &str = "ATTRIB_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSource {
    /// Dataset file (JSON array or JSON lines).
    pub path: Option<PathBuf>,
    pub schema: Schema,
    /// Cleaned-label sidecar applied after loading.
    pub labels: Option<PathBuf>,
    /// Merge duplicate sentences within a sample.
    pub dedupe: bool,
    /// Forest depth used for this dataset unless `forest.max_depth` is set.
    pub max_depth: usize,
}

impl DatasetSource {
    fn named(schema: Schema, dedupe: bool, max_depth: usize) -> Self {
        DatasetSource {
            path: None,
            schema,
            labels: None,
            dedupe,
            max_depth,
        }
    }
}

impl Default for DatasetSource {
    fn default() -> Self {
        DatasetSource::named(Schema::Hagrid, false, 14)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LexiconSection {
    /// Directory of word lists; the bundled lists are used when unset.
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestSection {
    pub n_trees: usize,
    /// Overrides the per-dataset depth.
    pub max_depth: Option<usize>,
    pub features_per_split: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestSection {
    fn default() -> Self {
        let p = ForestParams::default();
        ForestSection {
            n_trees: p.n_trees,
            max_depth: None,
            features_per_split: p.features_per_split,
            bootstrap: p.bootstrap,
            seed: p.seed,
        }
    }
}

impl ForestSection {
    pub fn params(&self, dataset_depth: usize) -> ForestParams {
        ForestParams {
            n_trees: self.n_trees,
            max_depth: self.max_depth.unwrap_or(dataset_depth),
            features_per_split: self.features_per_split,
            bootstrap: self.bootstrap,
            seed: self.seed,
            ..ForestParams::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    /// Deterministic character n-gram hashing embedder.
    Builtin,
    /// External embedding service over HTTP.
    Http,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingSection {
    pub kind: ProviderKind,
    pub endpoint: String,
    pub identity: String,
    pub dimension: usize,
    pub timeout_secs: f64,
    pub cache_dir: Option<PathBuf>,
    pub batch_size: usize,
}

impl Default for EmbeddingSection {
    fn default() -> Self {
        let h = HttpEmbedderConfig::default();
        EmbeddingSection {
            kind: ProviderKind::Builtin,
            endpoint: h.endpoint,
            identity: h.identity,
            dimension: h.dimension,
            timeout_secs: h.timeout_secs,
            cache_dir: h.cache_dir,
            batch_size: h.batch_size,
        }
    }
}

impl EmbeddingSection {
    pub fn http_config(&self) -> HttpEmbedderConfig {
        HttpEmbedderConfig {
            endpoint: self.endpoint.clone(),
            identity: self.identity.clone(),
            dimension: self.dimension,
            timeout_secs: self.timeout_secs,
            cache_dir: self.cache_dir.clone(),
            batch_size: self.batch_size,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiments {
    PreAttribution,
    Attribution,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ClassSourceSetting {
    Trained,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub runs: usize,
    /// Run `r` uses seed `seed + r` for both its split and its forest.
    pub seed: u64,
    pub train_fraction: f64,
    pub experiments: Experiments,
    pub class_source: ClassSourceSetting,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            runs: 30,
            seed: 0,
            train_fraction: 0.7,
            experiments: Experiments::Both,
            class_source: ClassSourceSetting::Trained,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSection {
    pub seed: u64,
    pub samples: usize,
    pub quotes_per_sample: usize,
    pub sentences_per_sample: usize,
    /// Zero, One and Multi shares.
    pub proportions: [f64; 3],
}

impl Default for SyntheticSection {
    fn default() -> Self {
        let s = SyntheticConfig::default();
        SyntheticSection {
            seed: s.seed,
            samples: s.n_samples,
            quotes_per_sample: s.quotes_per_sample,
            sentences_per_sample: s.sentences_per_sample,
            proportions: s.proportions,
        }
    }
}

impl SyntheticSection {
    pub fn config(&self) -> SyntheticConfig {
        SyntheticConfig {
            seed: self.seed,
            n_samples: self.samples,
            quotes_per_sample: self.quotes_per_sample,
            sentences_per_sample: self.sentences_per_sample,
            proportions: self.proportions,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// Model file for `attribute`; defaults to `model.json` under `--out`.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub hagrid: DatasetSource,
    pub hagrid_clean: DatasetSource,
    pub webglm_qa: DatasetSource,
    /// Dataset given by path on the command line.
    pub custom: DatasetSource,
    pub synthetic: SyntheticSection,
    pub lexicon: LexiconSection,
    pub forest: ForestSection,
    pub embedding: EmbeddingSection,
    pub eval: EvalSection,
    pub model: ModelSection,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            hagrid: DatasetSource::named(Schema::Hagrid, false, 14),
            hagrid_clean: DatasetSource::named(Schema::HagridClean, true, 14),
            webglm_qa: DatasetSource::named(Schema::WebglmQa, false, 22),
            custom: DatasetSource::default(),
            synthetic: SyntheticSection::default(),
            lexicon: LexiconSection::default(),
            forest: ForestSection::default(),
            embedding: EmbeddingSection::default(),
            eval: EvalSection::default(),
            model: ModelSection::default(),
        }
    }
}

const SECTIONS: &[&str] = &[
    "hagrid_clean",
    "hagrid",
    "webglm_qa",
    "custom",
    "synthetic",
    "lexicon",
    "forest",
    "embedding",
    "eval",
    "model",
];

impl PipelineConfig {
    /// Reads `path` (or the defaults), then applies environment overrides.
    pub fn load(path: Option<&Path>, env: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                text.parse::<Table>()
                    .with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Table::new(),
        };
        // Fill in defaults so overrides know each key's type.
        let defaults = Table::try_from(PipelineConfig::default())?;
        merge_defaults(&mut table, &defaults);
        let mut env: Vec<(String, String)> = env.into_iter().collect();
        env.sort();
        for (name, value) in env {
            apply_override(&mut table, &name, &value)?;
        }
        let config: PipelineConfig = table
            .try_into()
            .context("invalid configuration")?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.eval.runs >= 1, "eval.runs must be at least 1");
        ensure!(
            self.eval.train_fraction > 0.0 && self.eval.train_fraction < 1.0,
            "eval.train_fraction must lie strictly between 0 and 1"
        );
        ensure!(self.forest.n_trees >= 1, "forest.n_trees must be at least 1");
        ensure!(
            (1..=preattr::features::FEATURE_COUNT).contains(&self.forest.features_per_split),
            "forest.features_per_split must be in [1, {}]",
            preattr::features::FEATURE_COUNT
        );
        if let Some(d) = self.forest.max_depth {
            ensure!(d >= 1, "forest.max_depth must be at least 1");
        }
        ensure!(self.embedding.dimension >= 1, "embedding.dimension must be positive");
        ensure!(self.embedding.batch_size >= 1, "embedding.batch_size must be positive");
        ensure!(
            self.embedding.timeout_secs > 0.0 && self.embedding.timeout_secs.is_finite(),
            "embedding.timeout_secs must be positive"
        );
        ensure!(
            self.synthetic.proportions.iter().all(|p| *p >= 0.0 && p.is_finite())
                && self.synthetic.proportions.iter().sum::<f64>() > 0.0,
            "synthetic.proportions must be non-negative with a positive sum"
        );
        for (name, src) in self.datasets() {
            ensure!(src.max_depth >= 1, "{name}.max_depth must be at least 1");
            for p in src.path.iter().chain(&src.labels) {
                ensure!(p.exists(), "{name}: {} does not exist", p.display());
            }
        }
        if let Some(dir) = &self.lexicon.dir {
            ensure!(dir.is_dir(), "lexicon.dir {} is not a directory", dir.display());
        }
        Ok(())
    }

    fn datasets(&self) -> [(&'static str, &DatasetSource); 4] {
        [
            ("hagrid", &self.hagrid),
            ("hagrid_clean", &self.hagrid_clean),
            ("webglm_qa", &self.webglm_qa),
            ("custom", &self.custom),
        ]
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }
}

fn merge_defaults(table: &mut Table, defaults: &Table) {
    for (k, v) in defaults {
        match (table.get_mut(k), v) {
            (Some(Value::Table(t)), Value::Table(d)) => merge_defaults(t, d),
            (Some(_), _) => {}
            (None, v) => {
                table.insert(k.clone(), v.clone());
            }
        }
    }
}

/// Applies `ATTRIB_<SECTION>_<KEY>=value`. Variables naming no known section
/// are ignored; a known section with an unknown key is an error.
fn apply_override(table: &mut Table, name: &str, raw: &str) -> Result<()> {
    let Some(rest) = name.strip_prefix(ENV_PREFIX) else {
        return Ok(());
    };
    let rest = rest.to_ascii_lowercase();
    let Some((section, key)) = SECTIONS.iter().find_map(|s| {
        rest.strip_prefix(s)
            .and_then(|k| k.strip_prefix('_'))
            .filter(|k| !k.is_empty())
            .map(|k| (*s, k))
    }) else {
        log::debug!("ignoring environment variable {name}");
        return Ok(());
    };
    let Some(Value::Table(sec)) = table.get_mut(section) else {
        bail!("{name}: section {section} is not a table");
    };
    let value = match sec.get(key) {
        Some(existing) => typed_value(existing, raw)
            .with_context(|| format!("{name}: cannot use {raw:?} for {section}.{key}"))?,
        None if OPTIONAL_KEYS.contains(&(section, key)) || optional_path(key) => {
            Value::String(raw.to_string())
        }
        None if key == "max_depth" => Value::Integer(
            raw.trim()
                .parse()
                .with_context(|| format!("{name}: expected an integer"))?,
        ),
        None => bail!("{name}: unknown key {section}.{key}"),
    };
    sec.insert(key.to_string(), value);
    Ok(())
}

const OPTIONAL_KEYS: &[(&str, &str)] = &[("embedding", "cache_dir"), ("lexicon", "dir")];

fn optional_path(key: &str) -> bool {
    matches!(key, "path" | "labels")
}

fn typed_value(existing: &Value, raw: &str) -> Result<Value> {
    let raw = raw.trim();
    Ok(match existing {
        Value::String(_) => Value::String(raw.to_string()),
        Value::Integer(_) => Value::Integer(raw.parse()?),
        Value::Float(_) => Value::Float(raw.parse()?),
        Value::Boolean(_) => Value::Boolean(raw.parse()?),
        Value::Array(_) => {
            let parsed: Table = format!("v = [{raw}]").parse()?;
            parsed["v"].clone()
        }
        other => bail!("overriding a {} is not supported", other.type_str()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults_validate() {
        let c = PipelineConfig::load(None, env(&[])).unwrap();
        assert_eq!(c, PipelineConfig::default());
        assert_eq!(c.webglm_qa.max_depth, 22);
        assert!(c.hagrid_clean.dedupe && !c.hagrid.dedupe);
    }

    #[test]
    fn effective_config_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cache = dir.path().join("cache");
        let c = PipelineConfig::load(
            None,
            env(&[
                ("ATTRIB_EVAL_RUNS", "7"),
                ("ATTRIB_EVAL_TRAIN_FRACTION", "0.6"),
                ("ATTRIB_FOREST_MAX_DEPTH", "9"),
                ("ATTRIB_EMBEDDING_KIND", "http"),
                ("ATTRIB_EMBEDDING_CACHE_DIR", cache.to_str().unwrap()),
                ("ATTRIB_SYNTHETIC_PROPORTIONS", "0.2, 0.4, 0.4"),
            ]),
        )
        .unwrap();
        assert_eq!(c.eval.runs, 7);
        assert_eq!(c.forest.max_depth, Some(9));
        assert_eq!(c.embedding.kind, ProviderKind::Http);
        assert_eq!(c.synthetic.proportions, [0.2, 0.4, 0.4]);
        let path = dir.path().join("config.toml");
        std::fs::write(&path, c.to_toml().unwrap()).unwrap();
        let reloaded = PipelineConfig::load(Some(&path), env(&[])).unwrap();
        assert_eq!(reloaded, c);
    }

    #[test]
    fn longest_section_wins() {
        let dir = tempfile::tempdir().unwrap();
        let data = dir.path().join("clean.jsonl");
        std::fs::write(&data, "").unwrap();
        let c = PipelineConfig::load(
            None,
            env(&[("ATTRIB_HAGRID_CLEAN_PATH", data.to_str().unwrap())]),
        )
        .unwrap();
        assert_eq!(c.hagrid_clean.path.as_deref(), Some(data.as_path()));
        assert_eq!(c.hagrid.path, None);
    }

    #[test]
    fn file_values_and_unrelated_variables() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[forest]\nn_trees = 12\n[eval]\nexperiments = \"attribution\"\n").unwrap();
        let c = PipelineConfig::load(Some(&path), env(&[("ATTRIB_VERBOSE", "1"), ("HOME", "/")])).unwrap();
        assert_eq!(c.forest.n_trees, 12);
        assert_eq!(c.eval.experiments, Experiments::Attribution);
        assert_eq!(c.eval.runs, 30);
    }

    #[test]
    fn rejects_bad_values() {
        for (k, v) in [
            ("ATTRIB_EVAL_RUNS", "0"),
            ("ATTRIB_EVAL_RUNS", "many"),
            ("ATTRIB_EVAL_TRAIN_FRACTION", "1.0"),
            ("ATTRIB_FOREST_FEATURES_PER_SPLIT", "25"),
            ("ATTRIB_FOREST_COLOUR", "red"),
            ("ATTRIB_HAGRID_PATH", "/definitely/not/here.jsonl"),
        ] {
            assert!(PipelineConfig::load(None, env(&[(k, v)])).is_err(), "{k}={v}");
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[forest]\ndepth = 3\n").unwrap();
        assert!(PipelineConfig::load(Some(&path), env(&[])).is_err());
    }
}
