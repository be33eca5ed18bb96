use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{LabeledCorpus, RefClass};
use crate::error::{Error, Result};

/// Splits `corpus` into train and test parts, keeping each class's share of
/// the training part within one sentence of `train_fraction * n_class`.
///
/// Both parts keep the corpus order of their sentences. The split depends
/// only on the corpus and `seed`.
pub fn stratified_split(
    corpus: &LabeledCorpus,
    train_fraction: f64,
    seed: u64,
) -> Result<(LabeledCorpus, LabeledCorpus)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::precondition(format!(
            "train fraction {train_fraction} must lie strictly between 0 and 1"
        )));
    }
    if corpus.is_empty() {
        return Err(Error::precondition("cannot split an empty corpus"));
    }
    for class in RefClass::ALL {
        let n = corpus.class_counts[class.index()];
        if n < 2 {
            return Err(Error::precondition(format!(
                "cannot stratify: class {class} has {n} member(s), at least 2 required"
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; corpus.len()];
    for class in RefClass::ALL {
        let mut members: Vec<usize> = corpus
            .sentences
            .iter()
            .enumerate()
            .filter(|(_, s)| s.sentence.ref_class == class)
            .map(|(i, _)| i)
            .collect();
        let n = members.len();
        let take = ((train_fraction * n as f64).round() as usize).clamp(1, n - 1);
        members.shuffle(&mut rng);
        for &i in &members[..take] {
            in_train[i] = true;
        }
    }

    let (train, test): (Vec<usize>, Vec<usize>) = (0..corpus.len()).partition(|&i| in_train[i]);
    Ok((corpus.subset(&train), corpus.subset(&test)))
}
