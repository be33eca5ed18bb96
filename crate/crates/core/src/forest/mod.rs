//! Class-weighted random forest over feature vectors.

mod bundle;
pub mod tree;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{count_classes, RefClass};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_COUNT};

pub use bundle::ModelBundle;
pub use tree::{DecisionTree, TreeParams};

pub const FORMAT: &str = "preattr-forest";
pub const FORMAT_VERSION: u32 = 1;

/// Vote shares closer than this are tied.
const VOTE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassWeight {
    /// `w_c = N / (3 n_c)`.
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub class_weight: ClassWeight,
    pub features_per_split: usize,
    pub seed: u64,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: 14,
            class_weight: ClassWeight::Balanced,
            features_per_split: 4,
            seed: 0,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::precondition("n_trees must be positive"));
        }
        if self.max_depth == 0 {
            return Err(Error::precondition("max_depth must be at least 1"));
        }
        if !(1..=n_features).contains(&self.features_per_split) {
            return Err(Error::precondition(format!(
                "features_per_split must be in [1, {n_features}], got {}",
                self.features_per_split
            )));
        }
        Ok(())
    }
}

/// `w_c = N / (3 n_c)`; every class must occur.
pub fn balanced_class_weights(labels: &[RefClass]) -> Result<[f64; 3]> {
    let counts = count_classes(labels.iter().copied());
    if let Some(missing) = RefClass::ALL.iter().find(|c| counts[c.index()] == 0) {
        return Err(Error::precondition(format!(
            "class `{missing}` has no samples"
        )));
    }
    let n = labels.len() as f64;
    Ok(counts.map(|c| n / (3.0 * c as f64)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub format: String,
    pub version: u32,
    pub params: ForestParams,
    pub n_features: usize,
    pub class_weights: [f64; 3],
    /// SHA-256 of the training matrix and labels.
    pub train_fingerprint: String,
    pub trees: Vec<DecisionTree>,
}

/// SHA-256 over little-endian feature bits and class indices.
pub fn training_fingerprint(rows: &[&[f64]], labels: &[RefClass]) -> String {
    let mut h = Sha256::new();
    h.update((rows.len() as u64).to_le_bytes());
    for (row, label) in rows.iter().zip(labels) {
        for v in *row {
            h.update(v.to_bits().to_le_bytes());
        }
        h.update([label.index() as u8]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Fits on feature vectors with balanced class weights.
pub fn fit_forest(x: &[FeatureVector], y: &[RefClass], params: &ForestParams) -> Result<ForestModel> {
    for v in x {
        v.check_finite()?;
    }
    let rows: Vec<&[f64]> = x.iter().map(|v| v.values.as_slice()).collect();
    fit_rows(&rows, y, params)
}

/// Fits on rows of any common width with balanced class weights.
pub fn fit_rows(rows: &[&[f64]], y: &[RefClass], params: &ForestParams) -> Result<ForestModel> {
    let ClassWeight::Balanced = params.class_weight;
    let weights = balanced_class_weights(y)?;
    fit_rows_weighted(rows, y, params, weights)
}

/// Fits with explicit class weights (all ones gives an unweighted forest).
pub fn fit_rows_weighted(
    rows: &[&[f64]],
    y: &[RefClass],
    params: &ForestParams,
    class_weights: [f64; 3],
) -> Result<ForestModel> {
    if rows.len() != y.len() {
        return Err(Error::precondition(format!(
            "{} rows but {} labels",
            rows.len(),
            y.len()
        )));
    }
    if rows.is_empty() {
        return Err(Error::precondition("no training samples"));
    }
    let n_features = rows[0].len();
    if rows.iter().any(|r| r.len() != n_features) {
        return Err(Error::precondition("rows differ in width"));
    }
    if let Some(i) = rows.iter().flat_map(|r| r.iter()).position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteFeature {
            index: i % n_features,
        });
    }
    params.validate(n_features)?;

    let labels: Vec<usize> = y.iter().map(|c| c.index()).collect();
    let mut master = ChaCha8Rng::seed_from_u64(params.seed);
    let seeds: Vec<u64> = (0..params.n_trees).map(|_| master.next_u64()).collect();
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        features_per_split: params.features_per_split,
    };
    let n = rows.len();
    let trees = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut counts = vec![0u32; n];
            if params.bootstrap {
                for _ in 0..n {
                    counts[(rng.next_u64() % n as u64) as usize] += 1;
                }
            } else {
                counts.iter_mut().for_each(|c| *c = 1);
            }
            let weights: Vec<f64> = counts
                .iter()
                .zip(&labels)
                .map(|(&c, &l)| f64::from(c) * class_weights[l])
                .collect();
            DecisionTree::fit(rows, &labels, &weights, &tree_params, &mut rng)
        })
        .collect();

    Ok(ForestModel {
        format: FORMAT.into(),
        version: FORMAT_VERSION,
        params: params.clone(),
        n_features,
        class_weights,
        train_fingerprint: training_fingerprint(rows, y),
        trees,
    })
}

/// Index of the largest share; near-ties prefer Multi, then One.
fn argmax_conservative(p: &[f64; 3]) -> RefClass {
    let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    RefClass::ALL
        .iter()
        .rev()
        .copied()
        .find(|c| p[c.index()] >= max - VOTE_TOLERANCE)
        .expect("non-empty")
}

impl ForestModel {
    /// Mean of the trees' leaf vote shares.
    pub fn predict_proba_row(&self, x: &[f64]) -> Result<[f64; 3]> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature { index });
        }
        let mut sum = [0.0; 3];
        for t in &self.trees {
            let p = t.predict_proba(x);
            for c in 0..3 {
                sum[c] += p[c];
            }
        }
        let total: f64 = sum.iter().sum();
        Ok(sum.map(|s| s / total))
    }

    pub fn predict_row(&self, x: &[f64]) -> Result<RefClass> {
        Ok(argmax_conservative(&self.predict_proba_row(x)?))
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> Result<[f64; 3]> {
        self.predict_proba_row(&x.values)
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<RefClass> {
        self.predict_row(&x.values)
    }

    pub fn predict_all(&self, x: &[FeatureVector]) -> Result<Vec<RefClass>> {
        x.par_iter().map(|v| self.predict(v)).collect()
    }

    pub fn max_depth(&self) -> usize {
        self.trees.iter().map(|t| t.depth).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: ForestModel = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.format != FORMAT || self.version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!(
                "expected {FORMAT} v{FORMAT_VERSION}, found {} v{}",
                self.format, self.version
            )));
        }
        if self.trees.is_empty() || self.trees.len() != self.params.n_trees {
            return Err(Error::ModelFormat("tree count does not match n_trees".into()));
        }
        for (i, t) in self.trees.iter().enumerate() {
            t.validate(self.n_features)
                .map_err(|e| Error::ModelFormat(format!("tree {i}: {e}")))?;
        }
        Ok(())
    }

    /// Whether this model consumes the standard feature vector.
    pub fn expects_feature_vectors(&self) -> bool {
        self.n_features == FEATURE_COUNT
    }
}
