//! One function per subcommand.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use preattr::eval::report::EvaluationResults;
use preattr::eval::{
    run_attribution_experiment, run_pre_attribution_experiment, ClassSource, ExperimentConfig,
};
use preattr::features::{write_csv, FeatureExtractor, Lexicons};
use preattr::forest::{fit_forest, ModelBundle};
use preattr::{attribute_document_with, EmbeddingProvider, HashEmbedder, HttpEmbedder};

use crate::config::{ClassSourceSetting, Experiments, PipelineConfig, ProviderKind};
use crate::dataset::{self, Dataset};
use crate::output::{CorpusStats, OutDir, RunInfo};
use crate::{Common, DatasetArgs};

pub const MODEL_FILE: &str = "model.json";

/// What a successful command reports back for the exit status.
pub struct Outcome {
    pub warnings: usize,
    /// Items that could not be processed (the command still completed).
    pub failures: usize,
    pub strict: bool,
}

fn load_config(common: &Common) -> Result<PipelineConfig> {
    let mut config = PipelineConfig::load(common.config.as_deref(), std::env::vars())?;
    if let Some(seed) = common.seed {
        config.eval.seed = seed;
        config.forest.seed = seed;
        config.synthetic.seed = seed;
    }
    Ok(config)
}

fn lexicons(config: &PipelineConfig) -> Result<Arc<Lexicons>> {
    match &config.lexicon.dir {
        Some(dir) => Ok(Arc::new(
            Lexicons::from_dir(dir).with_context(|| format!("loading lexicons from {}", dir.display()))?,
        )),
        None => Ok(Lexicons::bundled()),
    }
}

fn provider(config: &PipelineConfig) -> Result<Box<dyn EmbeddingProvider>> {
    Ok(match config.embedding.kind {
        ProviderKind::Builtin => Box::new(HashEmbedder::new()),
        ProviderKind::Http => Box::new(HttpEmbedder::new(config.embedding.http_config())?),
    })
}

fn load_dataset(data: &DatasetArgs, config: &PipelineConfig) -> Result<Dataset> {
    dataset::resolve(&data.dataset, data.schema, config)
}

fn outcome(common: &Common, warnings: usize, failures: usize) -> Outcome {
    Outcome {
        warnings,
        failures,
        strict: common.strict,
    }
}

fn stats(samples: usize, corpus: &preattr::LabeledCorpus) -> Option<CorpusStats> {
    Some(CorpusStats {
        samples,
        sentences: corpus.len(),
        class_counts: corpus.class_counts,
    })
}

fn fit_extractor(ds: &Dataset, lex: &Arc<Lexicons>) -> Result<FeatureExtractor> {
    let texts: Vec<&str> = ds.corpus.sentences.iter().map(|s| s.sentence.text.as_str()).collect();
    Ok(FeatureExtractor::fit_with(&texts, Arc::clone(lex))?)
}

pub fn ingest(common: &Common, data: &DatasetArgs) -> Result<Outcome> {
    let config = load_config(common)?;
    let ds = load_dataset(data, &config)?;
    let raw = preattr::LabeledCorpus::from_samples(&ds.samples);
    let mut out = OutDir::create(&common.out)?;
    let mut buf = Vec::new();
    raw.write_cleaned_jsonl(&mut buf)?;
    out.write("corpus.jsonl", buf)?;
    println!(
        "{}: {} samples, {} sentences (zero/one/multi = {}/{}/{})",
        ds.name,
        ds.samples.len(),
        raw.len(),
        raw.class_counts[0],
        raw.class_counts[1],
        raw.class_counts[2]
    );
    let lex = lexicons(&config)?;
    out.finish(
        &config,
        RunInfo {
            command: "ingest",
            dataset: Some(&ds.name),
            corpus: stats(ds.samples.len(), &raw),
            provider: None,
            lexicon_version: lex.version(),
            warnings: ds.warnings.len(),
        },
    )?;
    Ok(outcome(common, ds.warnings.len(), 0))
}

pub fn clean(common: &Common, data: &DatasetArgs, labels: Option<PathBuf>) -> Result<Outcome> {
    let mut config = load_config(common)?;
    if let Some(l) = labels {
        if !l.exists() {
            bail!("label file {} does not exist", l.display());
        }
        match dataset::DatasetRef::parse(&data.dataset) {
            dataset::DatasetRef::Configured("hagrid") => config.hagrid.labels = Some(l),
            dataset::DatasetRef::Configured("hagrid_clean") => config.hagrid_clean.labels = Some(l),
            dataset::DatasetRef::Configured(_) => config.webglm_qa.labels = Some(l),
            dataset::DatasetRef::Path(_) => config.custom.labels = Some(l),
            dataset::DatasetRef::Synthetic => bail!("the synthetic dataset takes no labels"),
        }
    }
    let ds = load_dataset(data, &config)?;
    let clean = preattr::normalize_and_dedupe(&ds.samples);
    let mut out = OutDir::create(&common.out)?;
    let mut buf = Vec::new();
    clean.write_cleaned_jsonl(&mut buf)?;
    out.write("corpus.clean.jsonl", buf)?;
    println!(
        "{}: {} sentences after merging duplicates (zero/one/multi = {}/{}/{})",
        ds.name,
        clean.len(),
        clean.class_counts[0],
        clean.class_counts[1],
        clean.class_counts[2]
    );
    let lex = lexicons(&config)?;
    out.finish(
        &config,
        RunInfo {
            command: "clean",
            dataset: Some(&ds.name),
            corpus: stats(ds.samples.len(), &clean),
            provider: None,
            lexicon_version: lex.version(),
            warnings: ds.warnings.len(),
        },
    )?;
    Ok(outcome(common, ds.warnings.len(), 0))
}

pub fn features(common: &Common, data: &DatasetArgs) -> Result<Outcome> {
    let config = load_config(common)?;
    let ds = load_dataset(data, &config)?;
    let lex = lexicons(&config)?;
    let extractor = fit_extractor(&ds, &lex)?;
    let texts: Vec<&str> = ds.corpus.sentences.iter().map(|s| s.sentence.text.as_str()).collect();
    let rows = extractor.extract_all(&texts);
    let mut out = OutDir::create(&common.out)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows, &ds.corpus.labels())?;
    out.write("features.csv", buf)?;
    println!("{}: {} feature rows", ds.name, rows.len());
    out.finish(
        &config,
        RunInfo {
            command: "features",
            dataset: Some(&ds.name),
            corpus: stats(ds.samples.len(), &ds.corpus),
            provider: None,
            lexicon_version: lex.version(),
            warnings: ds.warnings.len(),
        },
    )?;
    Ok(outcome(common, ds.warnings.len(), 0))
}

pub fn train(common: &Common, data: &DatasetArgs) -> Result<Outcome> {
    let config = load_config(common)?;
    let ds = load_dataset(data, &config)?;
    let lex = lexicons(&config)?;
    let extractor = fit_extractor(&ds, &lex)?;
    let texts: Vec<&str> = ds.corpus.sentences.iter().map(|s| s.sentence.text.as_str()).collect();
    let rows = extractor.extract_all(&texts);
    let labels = ds.corpus.labels();
    let params = config.forest.params(ds.max_depth);
    let forest = fit_forest(&rows, &labels, &params)?;
    let predicted = forest.predict_all(&rows)?;
    let correct = predicted.iter().zip(&labels).filter(|(p, t)| p == t).count();
    let bundle = ModelBundle::new(forest, &extractor);
    let mut out = OutDir::create(&common.out)?;
    let path = out.write(MODEL_FILE, bundle.to_json()?)?;
    println!(
        "{}: trained {} trees (depth {}) on {} sentences, training accuracy {:.4}; model at {}",
        ds.name,
        params.n_trees,
        params.max_depth,
        rows.len(),
        correct as f64 / rows.len() as f64,
        path.display()
    );
    out.finish(
        &config,
        RunInfo {
            command: "train",
            dataset: Some(&ds.name),
            corpus: stats(ds.samples.len(), &ds.corpus),
            provider: None,
            lexicon_version: lex.version(),
            warnings: ds.warnings.len(),
        },
    )?;
    Ok(outcome(common, ds.warnings.len(), 0))
}

pub fn evaluate(
    common: &Common,
    data: &DatasetArgs,
    runs: Option<usize>,
    experiments: Option<Experiments>,
    class_source: Option<ClassSourceSetting>,
) -> Result<Outcome> {
    let mut config = load_config(common)?;
    if let Some(r) = runs {
        config.eval.runs = r;
    }
    if let Some(e) = experiments {
        config.eval.experiments = e;
    }
    if let Some(c) = class_source {
        config.eval.class_source = c;
    }
    config.validate()?;
    let ds = load_dataset(data, &config)?;
    let lex = lexicons(&config)?;
    let exp = ExperimentConfig {
        runs: config.eval.runs,
        base_seed: config.eval.seed,
        train_fraction: config.eval.train_fraction,
        forest: config.forest.params(ds.max_depth),
    };
    let mut results = EvaluationResults::new(ds.name.clone(), lex.version(), exp.clone());
    let e = config.eval.experiments;
    if matches!(e, Experiments::PreAttribution | Experiments::Both) {
        results.pre_attribution = Some(run_pre_attribution_experiment(&ds.corpus, &exp, &lex)?);
    }
    let mut identity = None;
    if matches!(e, Experiments::Attribution | Experiments::Both) {
        let p = provider(&config)?;
        let source = match config.eval.class_source {
            ClassSourceSetting::Trained => ClassSource::Trained,
            ClassSourceSetting::Oracle => ClassSource::Oracle,
        };
        results.attribution = Some(run_attribution_experiment(&ds.corpus, &exp, &lex, p.as_ref(), source)?);
        identity = Some(p.identity().to_string());
    }
    let mut out = OutDir::create(&common.out)?;
    let mut json = serde_json::to_string_pretty(&results)?;
    json.push('\n');
    out.write("results.json", json)?;
    let tables = results.render_tables();
    out.write("tables.txt", &tables)?;
    for (name, csv) in results.confusion_csvs() {
        out.write(&name, csv)?;
    }
    print!("{tables}");
    out.finish(
        &config,
        RunInfo {
            command: "evaluate",
            dataset: Some(&ds.name),
            corpus: stats(ds.samples.len(), &ds.corpus),
            provider: identity.as_deref(),
            lexicon_version: lex.version(),
            warnings: ds.warnings.len(),
        },
    )?;
    Ok(outcome(common, ds.warnings.len(), 0))
}

fn read_text(path: &Path, what: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {what} {}", path.display()))
}

pub fn attribute(common: &Common, answer: &Path, document: &Path, model: Option<PathBuf>) -> Result<Outcome> {
    let config = load_config(common)?;
    let model_path = model
        .or_else(|| config.model.path.clone())
        .unwrap_or_else(|| common.out.join(MODEL_FILE));
    if !model_path.exists() {
        bail!(
            "no trained model at {}; run `preattr train --dataset <name> --out {}` first or pass --model",
            model_path.display(),
            common.out.display()
        );
    }
    let bundle = ModelBundle::read(&model_path)
        .with_context(|| format!("loading model {}", model_path.display()))?;
    let answer = read_text(answer, "answer")?;
    let document = read_text(document, "document")?;
    if document.trim().is_empty() {
        bail!("the document is empty");
    }
    let lex = lexicons(&config)?;
    let extractor = bundle.extractor_with(Arc::clone(&lex));
    let p = provider(&config)?;
    let report = attribute_document_with(&answer, &document, &bundle, &extractor, p.as_ref())?;
    let text = report.render_text();
    let mut out = OutDir::create(&common.out)?;
    out.write("report.txt", &text)?;
    let mut json = report.render_json()?;
    json.push('\n');
    out.write("report.json", json)?;
    print!("{text}");
    let failures = report.failures();
    out.finish(
        &config,
        RunInfo {
            command: "attribute",
            dataset: None,
            corpus: None,
            provider: Some(p.identity()),
            lexicon_version: lex.version(),
            warnings: 0,
        },
    )?;
    Ok(outcome(common, 0, failures))
}
