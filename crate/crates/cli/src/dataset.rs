//! Resolves `--dataset` to a loaded corpus.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use preattr::corpus::{load_cleaned_labels, read_samples, LabeledCorpus, Warning};
use preattr::eval::generate_synthetic;
use preattr::{normalize_and_dedupe, QuerySample, Schema};

use crate::config::{DatasetSource, PipelineConfig};

pub struct Dataset {
    /// Name recorded in outputs: a configured dataset name, `synthetic`, or the file stem.
    pub name: String,
    pub samples: Vec<QuerySample>,
    pub corpus: LabeledCorpus,
    pub max_depth: usize,
    pub warnings: Vec<Warning>,
}

/// Which source a `--dataset` argument names.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetRef {
    Configured(&'static str),
    Synthetic,
    Path(PathBuf),
}

impl DatasetRef {
    pub fn parse(arg: &str) -> Self {
        match arg.to_ascii_lowercase().replace('-', "_").as_str() {
            "hagrid" => DatasetRef::Configured("hagrid"),
            "hagrid_clean" => DatasetRef::Configured("hagrid_clean"),
            "webglm_qa" | "webglm" => DatasetRef::Configured("webglm_qa"),
            "synthetic" => DatasetRef::Synthetic,
            _ => DatasetRef::Path(PathBuf::from(arg)),
        }
    }
}

pub fn resolve(arg: &str, schema: Option<Schema>, config: &PipelineConfig) -> Result<Dataset> {
    match DatasetRef::parse(arg) {
        DatasetRef::Synthetic => {
            if schema.is_some() {
                bail!("--schema does not apply to the synthetic dataset");
            }
            let s = generate_synthetic(&config.synthetic.config())?;
            Ok(Dataset {
                name: "synthetic".into(),
                samples: s.samples,
                corpus: s.corpus,
                max_depth: 14,
                warnings: Vec::new(),
            })
        }
        DatasetRef::Configured(name) => {
            let src = match name {
                "hagrid" => &config.hagrid,
                "hagrid_clean" => &config.hagrid_clean,
                _ => &config.webglm_qa,
            };
            let Some(path) = &src.path else {
                bail!(
                    "dataset {name} has no file configured; set {name}.path in the config \
                     or ATTRIB_{}_PATH (datasets are not bundled)",
                    name.to_ascii_uppercase()
                );
            };
            let mut src = src.clone();
            if let Some(s) = schema {
                src.schema = s;
            }
            load(name.replace('_', "-"), path.clone(), &src)
        }
        DatasetRef::Path(path) => {
            if !path.exists() {
                bail!(
                    "{} is neither a known dataset (hagrid, hagrid-clean, webglm-qa, synthetic) nor an existing file",
                    path.display()
                );
            }
            let mut src = config.custom.clone();
            if let Some(s) = schema {
                src.schema = s;
                src.dedupe = src.dedupe || s == Schema::HagridClean;
            }
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "custom".into());
            load(name, path, &src)
        }
    }
}

fn load(name: String, path: PathBuf, src: &DatasetSource) -> Result<Dataset> {
    let mut loaded = read_samples(&path, src.schema)
        .with_context(|| format!("loading {} as {}", path.display(), src.schema.as_str()))?;
    if let Some(labels) = &src.labels {
        let file = File::open(labels).with_context(|| format!("opening {}", labels.display()))?;
        let overrides = load_cleaned_labels(BufReader::new(file))
            .with_context(|| format!("reading labels {}", labels.display()))?;
        let missing = overrides.apply(&mut loaded.samples);
        for w in &missing {
            log::warn!("{}", w.message);
        }
        loaded.warnings.extend(missing);
    }
    let corpus = if src.dedupe {
        normalize_and_dedupe(&loaded.samples)
    } else {
        LabeledCorpus::from_samples(&loaded.samples)
    };
    log::info!(
        "{name}: {} samples, {} sentences, classes {:?}",
        loaded.samples.len(),
        corpus.len(),
        corpus.class_counts
    );
    Ok(Dataset {
        name,
        samples: loaded.samples,
        corpus,
        max_depth: src.max_depth,
        warnings: loaded.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_recognized() {
        assert_eq!(DatasetRef::parse("hagrid-clean"), DatasetRef::Configured("hagrid_clean"));
        assert_eq!(DatasetRef::parse("HAGRID"), DatasetRef::Configured("hagrid"));
        assert_eq!(DatasetRef::parse("synthetic"), DatasetRef::Synthetic);
        assert_eq!(DatasetRef::parse("data/x.jsonl"), DatasetRef::Path("data/x.jsonl".into()));
    }

    #[test]
    fn unconfigured_dataset_explains_itself() {
        let err = resolve("hagrid", None, &PipelineConfig::default()).err().unwrap();
        assert!(err.to_string().contains("ATTRIB_HAGRID_PATH"), "{err}");
    }
}
