//! Embedding-based attribution of sentences to source quotes.
//!
//! A sentence predicted to need one reference is matched to its closest
//! quote. A sentence predicted to need several is matched against every
//! quote and every quote pair, a pair being represented by the renormalized
//! mean of its two vectors.

mod embed;
mod http;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{Quote, RefClass};
use crate::error::{Error, Result};
use crate::features::FeatureExtractor;
use crate::forest::ForestModel;

pub use embed::{cosine_distance, EmbeddingProvider, EmbeddingVector, HashEmbedder, HASH_DIMENSION};
pub use http::{HttpEmbedder, HttpEmbedderConfig};

/// Distances within this of the minimum count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributionMethod {
    Skipped,
    ClosestOne,
    ClosestTwo,
}

impl AttributionMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AttributionMethod::Skipped => "skipped",
            AttributionMethod::ClosestOne => "closest_one",
            AttributionMethod::ClosestTwo => "closest_two",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionResult {
    pub refs: BTreeSet<u32>,
    pub method: AttributionMethod,
    /// Distance of the winning candidate; `None` when skipped.
    pub distance: Option<f64>,
}

impl AttributionResult {
    pub fn skipped() -> Self {
        AttributionResult {
            refs: BTreeSet::new(),
            method: AttributionMethod::Skipped,
            distance: None,
        }
    }
}

/// A quote's index together with its embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct QuoteVector {
    pub index: u32,
    pub vector: EmbeddingVector,
}

/// Embeds every quote once, in one batch.
pub fn embed_quotes(quotes: &[Quote], provider: &dyn EmbeddingProvider) -> Result<Vec<QuoteVector>> {
    let texts: Vec<&str> = quotes.iter().map(|q| q.text.as_str()).collect();
    Ok(quotes
        .iter()
        .zip(provider.embed_batch(&texts)?)
        .map(|(q, vector)| QuoteVector {
            index: q.index,
            vector,
        })
        .collect())
}

/// First entry of `candidates` whose distance is within tolerance of the minimum.
fn first_minimum(candidates: &[(Vec<u32>, f64)]) -> (Vec<u32>, f64) {
    let min = candidates
        .iter()
        .map(|c| c.1)
        .fold(f64::INFINITY, f64::min);
    candidates
        .iter()
        .find(|c| c.1 <= min + TIE_TOLERANCE)
        .cloned()
        .expect("at least one candidate")
}

fn sorted_by_index(quotes: &[QuoteVector]) -> Vec<&QuoteVector> {
    let mut q: Vec<&QuoteVector> = quotes.iter().collect();
    q.sort_by_key(|q| q.index);
    q
}

/// The single closest quote; ties go to the lowest quote index.
pub fn attribute_closest(sentence: &EmbeddingVector, quotes: &[QuoteVector]) -> Result<AttributionResult> {
    if quotes.is_empty() {
        return Err(Error::precondition("attribution needs at least one quote"));
    }
    let candidates = sorted_by_index(quotes)
        .into_iter()
        .map(|q| Ok((vec![q.index], cosine_distance(sentence, &q.vector)?)))
        .collect::<Result<Vec<_>>>()?;
    let (refs, d) = first_minimum(&candidates);
    Ok(AttributionResult {
        refs: refs.into_iter().collect(),
        method: AttributionMethod::ClosestOne,
        distance: Some(d),
    })
}

/// The closest among all single quotes and all quote pairs. Ties prefer
/// singletons, then the lexicographically smallest index set. Pairs of
/// opposite vectors have no mean direction and are not candidates. With fewer
/// than two quotes this falls back to [`attribute_closest`].
pub fn attribute_closest_pair(
    sentence: &EmbeddingVector,
    quotes: &[QuoteVector],
) -> Result<AttributionResult> {
    if quotes.len() < 2 {
        log::warn!("closest-pair attribution with {} quote(s); using the closest quote", quotes.len());
        return attribute_closest(sentence, quotes);
    }
    let q = sorted_by_index(quotes);
    let mut candidates = Vec::with_capacity(q.len() * (q.len() + 1) / 2);
    for a in &q {
        candidates.push((vec![a.index], cosine_distance(sentence, &a.vector)?));
    }
    for (i, a) in q.iter().enumerate() {
        for b in &q[i + 1..] {
            let pair = a.vector.mean_with(&b.vector)?;
            if pair.is_degenerate() {
                // Opposite vectors have no mean direction.
                continue;
            }
            candidates.push((vec![a.index, b.index], cosine_distance(sentence, &pair)?));
        }
    }
    let (refs, d) = first_minimum(&candidates);
    Ok(AttributionResult {
        refs: refs.into_iter().collect(),
        method: AttributionMethod::ClosestTwo,
        distance: Some(d),
    })
}

/// Attribution once the reference class is known. `Zero` skips without
/// computing an embedding.
pub fn attribute_for_class(
    class: RefClass,
    sentence: &str,
    quotes: &[QuoteVector],
    provider: &dyn EmbeddingProvider,
) -> Result<AttributionResult> {
    match class {
        RefClass::Zero => Ok(AttributionResult::skipped()),
        RefClass::One => attribute_closest(&provider.embed(sentence)?, quotes),
        RefClass::Multi => attribute_closest_pair(&provider.embed(sentence)?, quotes),
    }
}

/// Predicts the reference class of `sentence` and attributes accordingly.
pub fn route_and_attribute(
    sentence: &str,
    quotes: &[Quote],
    model: &ForestModel,
    extractor: &FeatureExtractor,
    provider: &dyn EmbeddingProvider,
) -> Result<AttributionResult> {
    if quotes.is_empty() {
        return Err(Error::precondition("attribution needs at least one quote"));
    }
    let class = model.predict(&extractor.extract(sentence))?;
    if class == RefClass::Zero {
        return Ok(AttributionResult::skipped());
    }
    let vectors = embed_quotes(quotes, provider)?;
    attribute_for_class(class, sentence, &vectors, provider)
}

/// Correctness of a predicted reference set against the gold set.
///
/// An empty gold set needs an empty prediction, a single gold reference needs
/// exactly that reference, and larger gold sets need at least two predicted
/// references, all of them gold.
pub fn judge_attribution(predicted: &BTreeSet<u32>, gold: &BTreeSet<u32>) -> bool {
    match gold.len() {
        0 => predicted.is_empty(),
        1 => predicted == gold,
        _ => predicted.len() >= 2 && predicted.is_subset(gold),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    fn unit(values: Vec<f64>) -> EmbeddingVector {
        EmbeddingVector::normalized(values).unwrap()
    }

    fn orthogonal(n: usize) -> Vec<QuoteVector> {
        (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                QuoteVector {
                    index: i as u32 + 1,
                    vector: unit(v),
                }
            })
            .collect()
    }

    #[test]
    fn judge_truth_table() {
        assert!(judge_attribution(&set(&[1, 2]), &set(&[1, 2, 3])));
        assert!(judge_attribution(&set(&[1, 2, 3]), &set(&[1, 2, 3])));
        assert!(!judge_attribution(&set(&[1, 2, 4]), &set(&[1, 2, 3])));
        assert!(!judge_attribution(&set(&[1]), &set(&[1, 2, 3])));
        assert!(judge_attribution(&set(&[]), &set(&[])));
        assert!(!judge_attribution(&set(&[1]), &set(&[])));
        assert!(!judge_attribution(&set(&[1]), &set(&[2])));
        assert!(judge_attribution(&set(&[2]), &set(&[2])));
        assert!(!judge_attribution(&set(&[2, 3]), &set(&[2])));
    }

    #[test]
    fn closest_exact_match() {
        let q = orthogonal(3);
        let r = attribute_closest(&q[1].vector, &q).unwrap();
        assert_eq!(r.refs, set(&[2]));
        assert_eq!(r.distance, Some(0.0));
    }

    #[test]
    fn closest_ties_go_to_lowest_index() {
        let q = orthogonal(3);
        let s = unit(vec![1.0, 1.0, 1.0]);
        assert_eq!(attribute_closest(&s, &q).unwrap().refs, set(&[1]));
    }

    #[test]
    fn closest_needs_a_quote() {
        assert!(attribute_closest(&unit(vec![1.0]), &[]).is_err());
    }

    #[test]
    fn pair_of_orthogonal_quotes() {
        let q = orthogonal(3);
        let s = q[0].vector.mean_with(&q[2].vector).unwrap();
        let r = attribute_closest_pair(&s, &q).unwrap();
        assert_eq!(r.refs, set(&[1, 3]));
        assert_eq!(r.method, AttributionMethod::ClosestTwo);
    }

    #[test]
    fn singleton_beats_pairs_at_zero_distance() {
        let q = orthogonal(3);
        assert_eq!(attribute_closest_pair(&q[1].vector, &q).unwrap().refs, set(&[2]));
    }

    #[test]
    fn pair_falls_back_with_one_quote() {
        let q = orthogonal(1);
        let r = attribute_closest_pair(&q[0].vector, &q).unwrap();
        assert_eq!(r.method, AttributionMethod::ClosestOne);
    }

    #[test]
    fn pair_vector_is_symmetric() {
        let a = unit(vec![0.3, -1.0, 2.0]);
        let b = unit(vec![1.5, 0.2, -0.7]);
        assert_eq!(a.mean_with(&b).unwrap(), b.mean_with(&a).unwrap());
    }

    #[test]
    fn zero_class_skips_without_embedding() {
        struct Refuses;
        impl EmbeddingProvider for Refuses {
            fn identity(&self) -> &str {
                "refuses"
            }
            fn dimension(&self) -> usize {
                1
            }
            fn embed_batch(&self, _: &[&str]) -> Result<Vec<EmbeddingVector>> {
                Err(Error::EmbeddingUnavailable("offline".into()))
            }
        }
        let r = attribute_for_class(RefClass::Zero, "anything", &[], &Refuses).unwrap();
        assert_eq!(r, AttributionResult::skipped());
        assert!(attribute_for_class(RefClass::One, "anything", &orthogonal(1), &Refuses).is_err());
    }
}
