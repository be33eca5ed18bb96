//! Quartiles and the Wilcoxon signed-rank test.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest sample size evaluated with the exact null distribution.
pub const EXACT_LIMIT: usize = 30;

/// Quantile with linear interpolation between order statistics
/// (`h = (n - 1) q`), the inclusive convention.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::precondition("quartiles of an empty sample"));
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Ok(Quartiles {
            q1: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q3: quantile(&v, 0.75),
        })
    }

    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedRankTest {
    /// Pairs with a nonzero difference.
    pub n: usize,
    /// Sum of ranks of positive differences `b - a`.
    pub w_plus: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// Average ranks of `abs` (ascending), grouping values within `tol`.
fn average_ranks(abs: &[f64], tol: f64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..abs.len()).collect();
    order.sort_by(|&a, &b| abs[a].total_cmp(&abs[b]));
    let mut ranks = vec![0.0; abs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && abs[order[j]] - abs[order[i]] <= tol {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        i = j;
    }
    ranks
}

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped and tied magnitudes get average ranks. Up to
/// [`EXACT_LIMIT`] pairs the p-value comes from the exact null
/// distribution of the rank sum; above that, from the normal approximation
/// with tie and continuity corrections.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<SignedRankTest> {
    if a.len() != b.len() {
        return Err(Error::precondition(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let scale = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let tol = 1e-12 * scale;
    let nonzero: Vec<f64> = diffs.into_iter().filter(|d| d.abs() > tol).collect();
    let n = nonzero.len();
    if n == 0 {
        return Ok(SignedRankTest {
            n: 0,
            w_plus: 0.0,
            p_value: 1.0,
            exact: true,
        });
    }
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs, tol);
    let w_plus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    if n <= EXACT_LIMIT {
        // Doubled ranks are integers even with ties.
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let max: usize = doubled.iter().sum();
        let mut ways = vec![0.0f64; max + 1];
        ways[0] = 1.0;
        for &r in &doubled {
            for s in (r..=max).rev() {
                ways[s] += ways[s - r];
            }
        }
        let total: f64 = ways.iter().sum();
        let w = (2.0 * w_plus).round() as usize;
        let lower: f64 = ways[..=w].iter().sum::<f64>() / total;
        let upper: f64 = ways[w..].iter().sum::<f64>() / total;
        return Ok(SignedRankTest {
            n,
            w_plus,
            p_value: (2.0 * lower.min(upper)).min(1.0),
            exact: true,
        });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&r| r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return Ok(SignedRankTest {
            n,
            w_plus,
            p_value: 1.0,
            exact: false,
        });
    }
    let dev = ((w_plus - mean).abs() - 0.5).max(0.0);
    let z = dev / var.sqrt();
    let normal = Normal::standard();
    Ok(SignedRankTest {
        n,
        w_plus,
        p_value: (2.0 * (1.0 - normal.cdf(z))).min(1.0),
        exact: false,
    })
}

/// p-value of [`wilcoxon_signed_rank`].
pub fn significance_test(a: &[f64], b: &[f64]) -> Result<f64> {
    Ok(wilcoxon_signed_rank(a, b)?.p_value)
}
