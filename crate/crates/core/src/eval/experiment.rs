//! Repeated stratified experiments.
//!
//! Run `r` splits the corpus and seeds the forest with `base_seed + r`, so
//! every configuration evaluated on run `r` sees the same split.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::confusion::ConfusionMatrix;
use super::stats::{wilcoxon_signed_rank, Quartiles, SignedRankTest};
use crate::attribution::{
    attribute_closest, attribute_closest_pair, embed_quotes, judge_attribution, AttributionMethod,
    EmbeddingProvider, QuoteVector,
};
use crate::corpus::{stratified_split, LabeledCorpus, RefClass};
use crate::error::{Error, Result};
use crate::features::{FeatureExtractor, Lexicons};
use crate::forest::{fit_forest, ForestParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub runs: usize,
    pub base_seed: u64,
    pub train_fraction: f64,
    pub forest: ForestParams,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            runs: 30,
            base_seed: 0,
            train_fraction: 0.7,
            forest: ForestParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub run_id: usize,
    pub seed: u64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub train_size: usize,
    pub test_size: usize,
    /// Classifier confusion on the test split, when a classifier was trained.
    pub confusion: Option<ConfusionMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub name: String,
    pub runs: Vec<RunMetrics>,
    pub train: Quartiles,
    pub test: Quartiles,
    /// Mean of the per-run row-normalized test confusion matrices.
    pub mean_confusion: Option<[[f64; 3]; 3]>,
}

impl ExperimentSummary {
    pub fn from_runs(name: impl Into<String>, runs: Vec<RunMetrics>) -> Result<Self> {
        let train: Vec<f64> = runs.iter().map(|r| r.train_accuracy).collect();
        let test: Vec<f64> = runs.iter().map(|r| r.test_accuracy).collect();
        let mean_confusion = if runs.iter().all(|r| r.confusion.is_some()) && !runs.is_empty() {
            let mut sum = [[0.0; 3]; 3];
            for r in &runs {
                let n = r.confusion.expect("checked").normalized()?;
                for i in 0..3 {
                    for j in 0..3 {
                        sum[i][j] += n[i][j];
                    }
                }
            }
            Some(sum.map(|row| row.map(|v| v / runs.len() as f64)))
        } else {
            None
        };
        Ok(ExperimentSummary {
            name: name.into(),
            train: Quartiles::of(&train)?,
            test: Quartiles::of(&test)?,
            runs,
            mean_confusion,
        })
    }

    pub fn test_accuracies(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.test_accuracy).collect()
    }
}

fn run_seed(base: u64, run: usize) -> u64 {
    base.wrapping_add(run as u64)
}

fn check_config(config: &ExperimentConfig) -> Result<()> {
    if config.runs == 0 {
        return Err(Error::precondition("run count must be positive"));
    }
    Ok(())
}

struct TrainedRun {
    train: LabeledCorpus,
    test: LabeledCorpus,
    /// Map from corpus sentence position to its split position.
    train_idx: Vec<usize>,
    test_idx: Vec<usize>,
    train_pred: Vec<RefClass>,
    test_pred: Vec<RefClass>,
}

/// Positions of each split's sentences in the full corpus.
fn positions(corpus: &LabeledCorpus, part: &LabeledCorpus) -> Vec<usize> {
    let index: HashMap<(usize, &str), usize> = corpus
        .sentences
        .iter()
        .enumerate()
        .map(|(i, s)| ((s.sample, s.sentence_id.as_str()), i))
        .collect();
    part.sentences
        .iter()
        .map(|s| index[&(s.sample, s.sentence_id.as_str())])
        .collect()
}

fn train_run(
    corpus: &LabeledCorpus,
    config: &ExperimentConfig,
    lexicons: &Arc<Lexicons>,
    seed: u64,
    classify: bool,
) -> Result<TrainedRun> {
    let (train, test) = stratified_split(corpus, config.train_fraction, seed)?;
    let train_idx = positions(corpus, &train);
    let test_idx = positions(corpus, &test);
    let (train_pred, test_pred) = if classify {
        let texts: Vec<&str> = train.sentences.iter().map(|s| s.sentence.text.as_str()).collect();
        let extractor = FeatureExtractor::fit_with(&texts, Arc::clone(lexicons))?;
        let x_train = extractor.extract_all(&texts);
        let test_texts: Vec<&str> = test.sentences.iter().map(|s| s.sentence.text.as_str()).collect();
        let x_test = extractor.extract_all(&test_texts);
        let params = ForestParams {
            seed,
            ..config.forest.clone()
        };
        let model = fit_forest(&x_train, &train.labels(), &params)?;
        (model.predict_all(&x_train)?, model.predict_all(&x_test)?)
    } else {
        (train.labels(), test.labels())
    };
    Ok(TrainedRun {
        train,
        test,
        train_idx,
        test_idx,
        train_pred,
        test_pred,
    })
}

fn accuracy(correct: impl Iterator<Item = bool>) -> f64 {
    let (mut hit, mut n) = (0usize, 0usize);
    for c in correct {
        n += 1;
        hit += usize::from(c);
    }
    hit as f64 / n as f64
}

/// Forest accuracy at predicting reference classes over repeated splits.
/// N-gram models are refit on each run's training split.
pub fn run_pre_attribution_experiment(
    corpus: &LabeledCorpus,
    config: &ExperimentConfig,
    lexicons: &Arc<Lexicons>,
) -> Result<ExperimentSummary> {
    check_config(config)?;
    let runs: Vec<RunMetrics> = (0..config.runs)
        .into_par_iter()
        .map(|r| {
            let seed = run_seed(config.base_seed, r);
            let t = train_run(corpus, config, lexicons, seed, true)?;
            let confusion = ConfusionMatrix::from_pairs(&t.test.labels(), &t.test_pred);
            let train_conf = ConfusionMatrix::from_pairs(&t.train.labels(), &t.train_pred);
            Ok(RunMetrics {
                run_id: r,
                seed,
                train_accuracy: train_conf.accuracy(),
                test_accuracy: confusion.accuracy(),
                train_size: t.train.len(),
                test_size: t.test.len(),
                confusion: Some(confusion),
            })
        })
        .collect::<Result<_>>()?;
    ExperimentSummary::from_runs("pre-attribution", runs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttributionConfig {
    /// `ClosestOne` or `ClosestTwo`.
    pub method: AttributionMethod,
    pub pre_attribution: bool,
}

impl AttributionConfig {
    /// The four method × pre-attribution combinations.
    pub const ALL: [AttributionConfig; 4] = [
        AttributionConfig { method: AttributionMethod::ClosestOne, pre_attribution: false },
        AttributionConfig { method: AttributionMethod::ClosestOne, pre_attribution: true },
        AttributionConfig { method: AttributionMethod::ClosestTwo, pre_attribution: false },
        AttributionConfig { method: AttributionMethod::ClosestTwo, pre_attribution: true },
    ];

    pub fn name(&self) -> String {
        format!(
            "{}/pre-attribution-{}",
            self.method.as_str(),
            if self.pre_attribution { "on" } else { "off" }
        )
    }

    /// References chosen for a sentence with predicted class `class`.
    fn refs<'a>(&self, class: RefClass, m: &'a SentenceMatches) -> Option<&'a BTreeSet<u32>> {
        let class = if self.pre_attribution { class } else { RefClass::Multi };
        match (class, self.method) {
            (RefClass::Zero, _) => None,
            (RefClass::One, _) | (RefClass::Multi, AttributionMethod::ClosestOne) => Some(&m.closest),
            (RefClass::Multi, _) => Some(&m.closest_pair),
        }
    }
}

/// Where pre-attribution classes come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassSource {
    /// A forest trained on each run's training split.
    Trained,
    /// The gold reference classes.
    Oracle,
}

/// Both matcher outcomes for one sentence. Embeddings do not depend on the
/// split, so these are computed once per corpus.
#[derive(Debug, Clone)]
struct SentenceMatches {
    gold: BTreeSet<u32>,
    closest: BTreeSet<u32>,
    closest_pair: BTreeSet<u32>,
}

fn match_all(corpus: &LabeledCorpus, provider: &dyn EmbeddingProvider) -> Result<Vec<SentenceMatches>> {
    let quote_vectors: Vec<Vec<QuoteVector>> = corpus
        .samples
        .iter()
        .map(|s| embed_quotes(&s.quotes, provider))
        .collect::<Result<_>>()?;
    let texts: Vec<&str> = corpus.sentences.iter().map(|s| s.sentence.text.as_str()).collect();
    let vectors = provider.embed_batch(&texts)?;
    corpus
        .sentences
        .par_iter()
        .zip(vectors.par_iter())
        .map(|(s, v)| {
            let quotes = &quote_vectors[s.sample];
            let (closest, closest_pair) = if quotes.is_empty() {
                (BTreeSet::new(), BTreeSet::new())
            } else {
                (
                    attribute_closest(v, quotes)?.refs,
                    attribute_closest_pair(v, quotes)?.refs,
                )
            };
            Ok(SentenceMatches {
                gold: s.sentence.gold_refs(),
                closest,
                closest_pair,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRow {
    pub method: AttributionMethod,
    /// Median test accuracy gain of pre-attribution on over off.
    pub median_gain: f64,
    pub test: SignedRankTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionExperiment {
    pub class_source: ClassSource,
    pub provider: String,
    pub configs: Vec<AttributionConfig>,
    pub summaries: Vec<ExperimentSummary>,
    pub significance: Vec<SignificanceRow>,
}

impl AttributionExperiment {
    pub fn summary(&self, config: AttributionConfig) -> Option<&ExperimentSummary> {
        self.configs
            .iter()
            .position(|c| *c == config)
            .map(|i| &self.summaries[i])
    }
}

/// Judge-correct rates of the four attribution configurations over repeated
/// splits. All configurations of a run share its split and classifier, and
/// each method is compared on against off with the signed-rank test.
pub fn run_attribution_experiment(
    corpus: &LabeledCorpus,
    config: &ExperimentConfig,
    lexicons: &Arc<Lexicons>,
    provider: &dyn EmbeddingProvider,
    class_source: ClassSource,
) -> Result<AttributionExperiment> {
    check_config(config)?;
    let matches = match_all(corpus, provider)?;
    let configs = AttributionConfig::ALL;
    let per_run: Vec<Vec<RunMetrics>> = (0..config.runs)
        .into_par_iter()
        .map(|r| {
            let seed = run_seed(config.base_seed, r);
            let t = train_run(corpus, config, lexicons, seed, class_source == ClassSource::Trained)?;
            let confusion = (class_source == ClassSource::Trained)
                .then(|| ConfusionMatrix::from_pairs(&t.test.labels(), &t.test_pred));
            let score = |cfg: &AttributionConfig, idx: &[usize], pred: &[RefClass]| {
                accuracy(idx.iter().zip(pred).map(|(&i, &class)| {
                    let m = &matches[i];
                    match cfg.refs(class, m) {
                        Some(refs) => judge_attribution(refs, &m.gold),
                        None => m.gold.is_empty(),
                    }
                }))
            };
            Ok(configs
                .iter()
                .map(|cfg| RunMetrics {
                    run_id: r,
                    seed,
                    train_accuracy: score(cfg, &t.train_idx, &t.train_pred),
                    test_accuracy: score(cfg, &t.test_idx, &t.test_pred),
                    train_size: t.train.len(),
                    test_size: t.test.len(),
                    confusion: if cfg.pre_attribution { confusion } else { None },
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let summaries: Vec<ExperimentSummary> = configs
        .iter()
        .enumerate()
        .map(|(k, cfg)| {
            ExperimentSummary::from_runs(cfg.name(), per_run.iter().map(|runs| runs[k].clone()).collect())
        })
        .collect::<Result<_>>()?;

    let mut significance = Vec::new();
    for method in [AttributionMethod::ClosestOne, AttributionMethod::ClosestTwo] {
        let find = |on: bool| {
            configs
                .iter()
                .position(|c| c.method == method && c.pre_attribution == on)
                .map(|i| &summaries[i])
                .expect("all configurations present")
        };
        let (off, on) = (find(false), find(true));
        significance.push(SignificanceRow {
            method,
            median_gain: on.test.median - off.test.median,
            test: wilcoxon_signed_rank(&off.test_accuracies(), &on.test_accuracies())?,
        });
    }
    Ok(AttributionExperiment {
        class_source,
        provider: provider.identity().to_string(),
        configs: configs.to_vec(),
        summaries,
        significance,
    })
}
