use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit-length embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    values: Vec<f64>,
    /// The raw vector was zero and was replaced by the first basis vector.
    degenerate: bool,
}

impl EmbeddingVector {
    /// L2-normalizes `raw`. A zero (or empty-norm) vector becomes `e0`.
    pub fn normalized(mut raw: Vec<f64>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::EmbeddingResponse("non-finite embedding value".into()));
        }
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            raw.iter_mut().for_each(|v| *v = 0.0);
            raw[0] = 1.0;
            return Ok(EmbeddingVector {
                values: raw,
                degenerate: true,
            });
        }
        raw.iter_mut().for_each(|v| *v /= norm);
        Ok(EmbeddingVector {
            values: raw,
            degenerate: false,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn dot(&self, other: &EmbeddingVector) -> Result<f64> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: other.dimension(),
            });
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum())
    }

    /// `normalize((a + b) / 2)`, the candidate vector of a quote pair.
    pub fn mean_with(&self, other: &EmbeddingVector) -> Result<EmbeddingVector> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: other.dimension(),
            });
        }
        EmbeddingVector::normalized(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a + b) / 2.0)
                .collect(),
        )
    }
}

/// `1 - a·b`, clamped to `[0, 2]`.
pub fn cosine_distance(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64> {
    Ok((1.0 - a.dot(b)?).clamp(0.0, 2.0))
}

/// Source of sentence embeddings. Implementations must return the same
/// vector for the same text under the same identity.
pub trait EmbeddingProvider: Send + Sync {
    /// Model and version tag, recorded in outputs and cache keys.
    fn identity(&self) -> &str;

    fn dimension(&self) -> usize;

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>>;

    fn embed(&self, text: &str) -> Result<EmbeddingVector> {
        let mut v = self.embed_batch(&[text])?;
        v.pop()
            .ok_or_else(|| Error::EmbeddingResponse("empty response".into()))
    }
}

pub const HASH_DIMENSION: usize = 512;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Offline embedder over character n-grams.
///
/// Text is lowercased, whitespace runs become one space and the result is
/// padded with a space on each side. Every character 3-, 4- and 5-gram adds
/// one to bucket `fnv1a_64(utf8 bytes) mod 512`; the counts are then
/// L2-normalized. Only surface overlap is captured.
#[derive(Debug, Clone, Default)]
pub struct HashEmbedder;

impl HashEmbedder {
    pub const IDENTITY: &'static str = "builtin-hash/fnv1a64/char3-5/512";

    pub fn new() -> Self {
        HashEmbedder
    }

    pub fn raw_counts(text: &str) -> Vec<f64> {
        let lowered = text.to_lowercase();
        let words: Vec<&str> = lowered.split_whitespace().collect();
        let padded: Vec<char> = format!(" {} ", words.join(" ")).chars().collect();
        let mut counts = vec![0.0; HASH_DIMENSION];
        let mut buf = String::new();
        for n in 3..=5 {
            for gram in padded.windows(n) {
                buf.clear();
                buf.extend(gram);
                counts[(fnv1a(buf.as_bytes()) % HASH_DIMENSION as u64) as usize] += 1.0;
            }
        }
        counts
    }
}

impl EmbeddingProvider for HashEmbedder {
    fn identity(&self) -> &str {
        Self::IDENTITY
    }

    fn dimension(&self) -> usize {
        HASH_DIMENSION
    }

    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>> {
        texts
            .iter()
            .map(|t| EmbeddingVector::normalized(Self::raw_counts(t)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(dim: usize, i: usize, sign: f64) -> EmbeddingVector {
        let mut v = vec![0.0; dim];
        v[i] = sign;
        EmbeddingVector::normalized(v).unwrap()
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn hash_embedding_is_deterministic_and_unit() {
        let e = HashEmbedder;
        let a = e.embed("Evergreen trees keep their leaves.").unwrap();
        let b = e.embed("Evergreen trees keep their leaves.").unwrap();
        assert_eq!(a, b);
        let norm: f64 = a.values().iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn disjoint_text_has_positive_distance() {
        let e = HashEmbedder;
        let d = cosine_distance(&e.embed("abc").unwrap(), &e.embed("xyz").unwrap()).unwrap();
        assert!(d > 0.0);
    }

    #[test]
    fn distance_extremes() {
        let a = basis(4, 1, 1.0);
        assert_eq!(cosine_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(cosine_distance(&a, &basis(4, 2, 1.0)).unwrap(), 1.0);
        assert_eq!(cosine_distance(&a, &basis(4, 1, -1.0)).unwrap(), 2.0);
        assert!(matches!(
            cosine_distance(&a, &basis(3, 0, 1.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_vector_is_flagged() {
        let z = EmbeddingVector::normalized(vec![0.0; 3]).unwrap();
        assert!(z.is_degenerate());
        assert_eq!(z.values(), [1.0, 0.0, 0.0]);
        assert!(HashEmbedder.embed("").unwrap().values().iter().sum::<f64>() > 0.0);
    }
}
