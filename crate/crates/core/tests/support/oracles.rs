//! Exhaustive reference implementations shared by integration tests.

// Each test binary uses a different subset.
#![allow(dead_code)]

use preattr::RefClass;

const TOL: f64 = 1e-12;

/// Exhaustive greedy CART: every feature, every midpoint, impurities summed
/// from scratch at each candidate.
pub struct CartOracle<'a> {
    pub rows: &'a [Vec<f64>],
    pub labels: &'a [usize],
    pub weights: [f64; 3],
    pub max_depth: usize,
}

pub enum Node {
    Leaf([f64; 3]),
    Split(usize, f64, Box<Node>, Box<Node>),
}

impl CartOracle<'_> {
    fn votes(&self, idx: &[usize]) -> [f64; 3] {
        let mut v = [0.0; 3];
        for &i in idx {
            v[self.labels[i]] += self.weights[self.labels[i]];
        }
        v
    }

    fn impurity(&self, idx: &[usize]) -> f64 {
        let v = self.votes(idx);
        let t: f64 = v.iter().sum();
        if t == 0.0 {
            return 0.0;
        }
        t * (1.0 - v.iter().map(|c| (c / t) * (c / t)).sum::<f64>())
    }

    pub fn build(&self, idx: Vec<usize>, depth: usize) -> Node {
        let v = self.votes(&idx);
        if depth == self.max_depth || v.iter().filter(|&&x| x > 0.0).count() <= 1 {
            return Node::Leaf(v);
        }
        let parent = self.impurity(&idx);
        let mut best: Option<(f64, usize, f64)> = None;
        for f in 0..self.rows[0].len() {
            let mut values: Vec<f64> = idx.iter().map(|&i| self.rows[i][f]).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            for w in values.windows(2) {
                let t = (w[0] + w[1]) / 2.0;
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.rows[i][f] <= t);
                let gain = parent - self.impurity(&l) - self.impurity(&r);
                let better = match best {
                    None => true,
                    Some((g, bf, bt)) => gain > g + TOL || (gain >= g - TOL && (f, t) < (bf, bt)),
                };
                if better {
                    best = Some((gain, f, t));
                }
            }
        }
        match best {
            None => Node::Leaf(v),
            Some((_, f, t)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| self.rows[i][f] <= t);
                Node::Split(f, t, Box::new(self.build(l, depth + 1)), Box::new(self.build(r, depth + 1)))
            }
        }
    }
}

pub fn oracle_predict(node: &Node, x: &[f64]) -> RefClass {
    match node {
        Node::Split(f, t, l, r) => oracle_predict(if x[*f] <= *t { l } else { r }, x),
        Node::Leaf(v) => {
            let total: f64 = v.iter().sum();
            let p = v.map(|c| c / total);
            let max = p.iter().copied().fold(f64::MIN, f64::max);
            [RefClass::Multi, RefClass::One, RefClass::Zero]
                .into_iter()
                .find(|c| p[c.index()] >= max - TOL)
                .unwrap()
        }
    }
}

fn raw_distance(a: &[f64], b: &[f64]) -> f64 {
    1.0 - a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

/// Scans every candidate; keeps the smallest distance, breaking near-ties by
/// (size, index set).
pub fn brute_force(sentence: &[f64], quotes: &[Vec<f64>], pairs: bool) -> (Vec<u32>, f64) {
    let mut cands: Vec<(Vec<u32>, f64)> = Vec::new();
    for (i, q) in quotes.iter().enumerate() {
        cands.push((vec![i as u32 + 1], raw_distance(sentence, q)));
    }
    if pairs {
        for i in 0..quotes.len() {
            for j in i + 1..quotes.len() {
                let mean: Vec<f64> = quotes[i].iter().zip(&quotes[j]).map(|(a, b)| (a + b) / 2.0).collect();
                let norm = mean.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm == 0.0 {
                    continue;
                }
                let pair: Vec<f64> = mean.iter().map(|v| v / norm).collect();
                cands.push((vec![i as u32 + 1, j as u32 + 1], raw_distance(sentence, &pair)));
            }
        }
    }
    let min = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    cands
        .into_iter()
        .filter(|c| c.1 <= min + 1e-12)
        .min_by(|a, b| a.0.len().cmp(&b.0.len()).then(a.0.cmp(&b.0)))
        .unwrap()
}

