//! CART tree grown on weighted samples with the Gini criterion.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Gains closer than this are equal.
const GAIN_TOLERANCE: f64 = 1e-12;

/// A fitted tree as parallel node arrays. `feature[i] < 0` marks a leaf;
/// internal nodes send `x[feature] <= threshold` to `left`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub feature: Vec<i32>,
    pub threshold: Vec<f64>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
    /// Weighted class votes per node.
    pub value: Vec<[f64; 3]>,
    pub depth: usize,
}

pub struct TreeParams {
    pub max_depth: usize,
    pub features_per_split: usize,
}

/// Weighted Gini impurity times total weight.
fn weighted_gini(w: &[f64; 3]) -> f64 {
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    total - w.iter().map(|c| c * c).sum::<f64>() / total
}

#[derive(Clone, Copy)]
struct Split {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl Split {
    fn better_than(&self, other: &Option<Split>) -> bool {
        match other {
            None => true,
            Some(o) => {
                self.gain > o.gain + GAIN_TOLERANCE
                    || (self.gain >= o.gain - GAIN_TOLERANCE
                        && (self.feature, self.threshold) < (o.feature, o.threshold))
            }
        }
    }
}

/// Midpoint of two consecutive distinct values, nudged down to `lo` when
/// rounding would put it on `hi`.
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo / 2.0 + hi / 2.0;
    if m >= hi || !m.is_finite() {
        lo
    } else {
        m
    }
}

struct Grower<'a, R> {
    rows: &'a [&'a [f64]],
    labels: &'a [usize],
    weights: &'a [f64],
    params: &'a TreeParams,
    n_features: usize,
    rng: &'a mut R,
    tree: DecisionTree,
}

impl<R: Rng> Grower<'_, R> {
    fn class_weights(&self, idx: &[usize]) -> [f64; 3] {
        let mut w = [0.0; 3];
        for &i in idx {
            w[self.labels[i]] += self.weights[i];
        }
        w
    }

    fn best_split_on(&self, idx: &mut [usize], feature: usize, total: &[f64; 3]) -> Option<Split> {
        idx.sort_by(|&a, &b| self.rows[a][feature].total_cmp(&self.rows[b][feature]));
        let parent = weighted_gini(total);
        let mut left = [0.0; 3];
        let mut best: Option<Split> = None;
        for k in 0..idx.len() - 1 {
            let i = idx[k];
            left[self.labels[i]] += self.weights[i];
            let lo = self.rows[i][feature];
            let hi = self.rows[idx[k + 1]][feature];
            if lo == hi {
                continue;
            }
            let right = [total[0] - left[0], total[1] - left[1], total[2] - left[2]];
            let s = Split {
                feature,
                threshold: midpoint(lo, hi),
                gain: parent - weighted_gini(&left) - weighted_gini(&right),
            };
            if s.better_than(&best) {
                best = Some(s);
            }
        }
        best
    }

    fn push_leaf(&mut self, value: [f64; 3]) -> u32 {
        let t = &mut self.tree;
        t.feature.push(-1);
        t.threshold.push(0.0);
        t.left.push(0);
        t.right.push(0);
        t.value.push(value);
        (t.feature.len() - 1) as u32
    }

    fn grow(&mut self, idx: &mut [usize], depth: usize) -> u32 {
        let total = self.class_weights(idx);
        let node = self.push_leaf(total);
        self.tree.depth = self.tree.depth.max(depth);
        let pure = total.iter().filter(|&&w| w > 0.0).count() <= 1;
        if depth >= self.params.max_depth || pure || idx.len() < 2 {
            return node;
        }

        let mut order: Vec<usize> = (0..self.n_features).collect();
        order.shuffle(self.rng);
        let mut best: Option<Split> = None;
        let mut informative = 0;
        for &f in &order {
            if informative >= self.params.features_per_split {
                break;
            }
            if let Some(s) = self.best_split_on(idx, f, &total) {
                informative += 1;
                if s.better_than(&best) {
                    best = Some(s);
                }
            }
        }
        let Some(split) = best else {
            return node;
        };

        let mut mid = 0;
        for k in 0..idx.len() {
            if self.rows[idx[k]][split.feature] <= split.threshold {
                idx.swap(k, mid);
                mid += 1;
            }
        }
        let (l, r) = idx.split_at_mut(mid);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        let n = node as usize;
        self.tree.feature[n] = split.feature as i32;
        self.tree.threshold[n] = split.threshold;
        self.tree.left[n] = left;
        self.tree.right[n] = right;
        node
    }
}

impl DecisionTree {
    /// Grows a tree on the samples with positive weight. `labels` are class
    /// indices; `weights` combine multiplicity and class weight.
    pub fn fit<R: Rng>(
        rows: &[&[f64]],
        labels: &[usize],
        weights: &[f64],
        params: &TreeParams,
        rng: &mut R,
    ) -> DecisionTree {
        let n_features = rows.first().map_or(0, |r| r.len());
        let mut idx: Vec<usize> = (0..rows.len()).filter(|&i| weights[i] > 0.0).collect();
        let mut g = Grower {
            rows,
            labels,
            weights,
            params,
            n_features,
            rng,
            tree: DecisionTree {
                feature: Vec::new(),
                threshold: Vec::new(),
                left: Vec::new(),
                right: Vec::new(),
                value: Vec::new(),
                depth: 0,
            },
        };
        g.grow(&mut idx, 0);
        g.tree
    }

    pub fn leaf(&self, x: &[f64]) -> &[f64; 3] {
        let mut n = 0;
        while self.feature[n] >= 0 {
            n = if x[self.feature[n] as usize] <= self.threshold[n] {
                self.left[n] as usize
            } else {
                self.right[n] as usize
            };
        }
        &self.value[n]
    }

    /// Leaf vote shares.
    pub fn predict_proba(&self, x: &[f64]) -> [f64; 3] {
        let v = self.leaf(x);
        let total: f64 = v.iter().sum();
        if total <= 0.0 {
            return [1.0 / 3.0; 3];
        }
        [v[0] / total, v[1] / total, v[2] / total]
    }

    pub fn node_count(&self) -> usize {
        self.feature.len()
    }

    /// Structural checks for trees read from disk.
    pub(crate) fn validate(&self, n_features: usize) -> Result<(), String> {
        let n = self.feature.len();
        if n == 0
            || [self.threshold.len(), self.left.len(), self.right.len(), self.value.len()]
                .iter()
                .any(|&l| l != n)
        {
            return Err("node arrays have inconsistent lengths".into());
        }
        for i in 0..n {
            if self.value[i].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(format!("node {i} has invalid votes"));
            }
            if self.feature[i] >= 0 {
                let (l, r) = (self.left[i] as usize, self.right[i] as usize);
                if self.feature[i] as usize >= n_features
                    || l <= i
                    || r <= i
                    || l >= n
                    || r >= n
                    || !self.threshold[i].is_finite()
                {
                    return Err(format!("node {i} is malformed"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fit(rows: &[Vec<f64>], labels: &[usize], depth: usize) -> DecisionTree {
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let w = vec![1.0; rows.len()];
        DecisionTree::fit(
            &refs,
            labels,
            &w,
            &TreeParams {
                max_depth: depth,
                features_per_split: rows[0].len(),
            },
            &mut ChaCha8Rng::seed_from_u64(0),
        )
    }

    #[test]
    fn separable_data_is_learned() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 0.0]).collect();
        let labels: Vec<usize> = (0..10).map(|i| usize::from(i >= 5)).collect();
        let t = fit(&rows, &labels, 5);
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.feature[0], 0);
        assert_eq!(t.threshold[0], 4.5);
        for (r, &l) in rows.iter().zip(&labels) {
            assert_eq!(t.predict_proba(r)[l], 1.0);
        }
    }

    #[test]
    fn constant_features_give_majority_leaf() {
        let rows = vec![vec![1.0]; 5];
        let t = fit(&rows, &[0, 0, 1, 2, 0], 4);
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.value[0], [3.0, 1.0, 1.0]);
    }

    #[test]
    fn depth_is_bounded() {
        let rows: Vec<Vec<f64>> = (0..64).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..64).map(|i| i % 3).collect();
        for d in 1..6 {
            assert!(fit(&rows, &labels, d).depth <= d);
        }
    }

    #[test]
    fn midpoint_never_reaches_upper_value() {
        let lo: f64 = 1.0;
        let hi = f64::from_bits(lo.to_bits() + 1);
        assert_eq!(midpoint(lo, hi), lo);
        assert_eq!(midpoint(1.0, 2.0), 1.5);
    }
}
