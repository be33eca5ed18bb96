//! Result files: JSON, text tables and confusion CSVs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::confusion::matrix_csv;
use super::experiment::{AttributionExperiment, ClassSource, ExperimentConfig, ExperimentSummary};

pub const QUARTILE_CONVENTION: &str = "inclusive, linear interpolation";
pub const SIGNIFICANCE_TEST: &str = "two-sided Wilcoxon signed-rank over paired runs";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationResults {
    pub dataset: String,
    pub crate_version: String,
    pub lexicon_version: String,
    pub quartile_convention: String,
    pub significance_test: String,
    pub config: ExperimentConfig,
    pub pre_attribution: Option<ExperimentSummary>,
    pub attribution: Option<AttributionExperiment>,
}

impl EvaluationResults {
    pub fn new(dataset: impl Into<String>, lexicon_version: impl Into<String>, config: ExperimentConfig) -> Self {
        EvaluationResults {
            dataset: dataset.into(),
            crate_version: crate::VERSION.into(),
            lexicon_version: lexicon_version.into(),
            quartile_convention: QUARTILE_CONVENTION.into(),
            significance_test: SIGNIFICANCE_TEST.into(),
            config,
            pre_attribution: None,
            attribution: None,
        }
    }

    /// Plain-text tables: medians with interquartile ranges in percent.
    pub fn render_tables(&self) -> String {
        let pct = |v: f64| format!("{:6.2}", 100.0 * v);
        let cell = |s: &ExperimentSummary, test: bool| {
            let q = if test { &s.test } else { &s.train };
            format!("{} [{} - {}]", pct(q.median), pct(q.q1).trim(), pct(q.q3).trim())
        };
        let mut out = String::new();
        let runs = self.config.runs;
        if let Some(s) = &self.pre_attribution {
            let _ = writeln!(
                out,
                "Pre-attribution accuracy (%), median [q1 - q3] over {runs} runs, depth {}",
                self.config.forest.max_depth
            );
            let _ = writeln!(out, "{:<16} {:<26} {:<26}", "dataset", "training", "test");
            let _ = writeln!(out, "{:<16} {:<26} {:<26}", self.dataset, cell(s, false), cell(s, true));
            if let Some(m) = &s.mean_confusion {
                let _ = writeln!(out, "\nMean row-normalized test confusion (rows = true class)");
                let _ = writeln!(out, "{:<8} {:>7} {:>7} {:>7}", "", "zero", "one", "multi");
                for (name, row) in ["zero", "one", "multi"].iter().zip(m) {
                    let _ = writeln!(out, "{:<8} {:>7.3} {:>7.3} {:>7.3}", name, row[0], row[1], row[2]);
                }
            }
        }
        if let Some(a) = &self.attribution {
            if !out.is_empty() {
                out.push('\n');
            }
            let _ = writeln!(
                out,
                "Attribution accuracy (%), median [q1 - q3] over {runs} runs, classes: {}, provider: {}",
                match a.class_source {
                    ClassSource::Trained => "trained",
                    ClassSource::Oracle => "oracle",
                },
                a.provider
            );
            let _ = writeln!(out, "{:<14} {:<16} {:<26} {:<26}", "method", "pre-attribution", "training", "test");
            for (cfg, s) in a.configs.iter().zip(&a.summaries) {
                let _ = writeln!(
                    out,
                    "{:<14} {:<16} {:<26} {:<26}",
                    cfg.method.as_str(),
                    if cfg.pre_attribution { "on" } else { "off" },
                    cell(s, false),
                    cell(s, true)
                );
            }
            let _ = writeln!(out, "\nOn vs off, {}", SIGNIFICANCE_TEST);
            for row in &a.significance {
                let _ = writeln!(
                    out,
                    "{:<14} median gain {:+.2} points, n = {}, p = {:.3e}",
                    row.method.as_str(),
                    100.0 * row.median_gain,
                    row.test.n,
                    row.test.p_value
                );
            }
        }
        out
    }

    /// `(file name, contents)` for every confusion matrix worth writing.
    pub fn confusion_csvs(&self) -> Vec<(String, String)> {
        let mut files = Vec::new();
        if let Some(m) = self.pre_attribution.as_ref().and_then(|s| s.mean_confusion) {
            files.push(("confusion_pre_attribution.csv".to_string(), matrix_csv(&m)));
        }
        files
    }
}
