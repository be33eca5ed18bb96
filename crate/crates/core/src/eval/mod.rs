//! Experimental protocol: repeated stratified runs, quartiles, confusion
//! matrices, the paired signed-rank test and a synthetic oracle corpus.

mod confusion;
mod experiment;
pub mod report;
mod stats;
pub mod synthetic;

pub use confusion::{confusion_matrix_normalized, matrix_csv, ConfusionMatrix};
pub use experiment::{
    run_attribution_experiment, run_pre_attribution_experiment, AttributionConfig,
    AttributionExperiment, ClassSource, ExperimentConfig, ExperimentSummary, RunMetrics,
    SignificanceRow,
};
pub use stats::{quantile, significance_test, wilcoxon_signed_rank, Quartiles, SignedRankTest};
pub use synthetic::{generate_synthetic, generate_synthetic_corpus, SyntheticConfig, SyntheticCorpus};
