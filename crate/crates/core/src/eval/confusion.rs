use serde::{Deserialize, Serialize};

use crate::corpus::RefClass;
use crate::error::{Error, Result};

/// Counts indexed `[true class][predicted class]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix(pub [[u64; 3]; 3]);

impl ConfusionMatrix {
    pub fn from_pairs(truth: &[RefClass], predicted: &[RefClass]) -> Self {
        let mut m = ConfusionMatrix::default();
        for (t, p) in truth.iter().zip(predicted) {
            m.0[t.index()][p.index()] += 1;
        }
        m
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..3).map(|i| self.0[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        self.trace() as f64 / self.total() as f64
    }

    pub fn normalized(&self) -> Result<[[f64; 3]; 3]> {
        confusion_matrix_normalized(&self.0)
    }
}

/// Divides each row by its sum. A zero row is an error.
pub fn confusion_matrix_normalized(counts: &[[u64; 3]; 3]) -> Result<[[f64; 3]; 3]> {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in counts.iter().enumerate() {
        let sum: u64 = row.iter().sum();
        if sum == 0 {
            return Err(Error::precondition(format!(
                "confusion row `{}` is empty",
                RefClass::ALL[i]
            )));
        }
        for j in 0..3 {
            out[i][j] = row[j] as f64 / sum as f64;
        }
    }
    Ok(out)
}

/// CSV with a header row of predicted classes and one row per true class.
pub fn matrix_csv<T: std::fmt::Display>(m: &[[T; 3]; 3]) -> String {
    let mut s = String::from("true\\predicted,zero,one,multi\n");
    for (i, row) in m.iter().enumerate() {
        s.push_str(&format!(
            "{},{},{},{}\n",
            RefClass::ALL[i],
            row[0],
            row[1],
            row[2]
        ));
    }
    s
}
