use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Dataset;
use crate::{Error, Result};

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx
}

/// Unstratified random partition of `0..n`; the train side holds
/// `round(n * train_fraction)` indices.
pub fn random_split_indices(
    n: usize,
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train fraction {train_fraction} outside (0, 1)"
        )));
    }
    let n_train = (n as f64 * train_fraction).round() as usize;
    if n_train == 0 || n_train >= n {
        return Err(Error::invalid(format!(
            "train fraction {train_fraction} leaves an empty side for {n} samples"
        )));
    }
    let mut idx = shuffled(n, seed);
    let test = idx.split_off(n_train);
    Ok((idx, test))
}

/// Splits `data` into (train, test). Classes missing from the training side
/// are reported with a warning only.
pub fn random_split(data: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train_idx, test_idx) = random_split_indices(data.n_samples(), train_fraction, seed)?;
    let train = data.subset(&train_idx);
    let test = data.subset(&test_idx);
    let absent: Vec<usize> = train
        .class_counts()
        .iter()
        .enumerate()
        .filter(|&(c, &k)| k == 0 && data.class_counts()[c] > 0)
        .map(|(c, _)| c)
        .collect();
    if !absent.is_empty() {
        log::warn!("split seed {seed}: classes {absent:?} absent from the training side");
    }
    Ok((train, test))
}

/// `k` (train, validation) index pairs whose validation parts partition
/// `0..n`. The first `n % k` folds get one extra index.
pub fn kfold_indices(n: usize, k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 {
        return Err(Error::invalid("k-fold needs k >= 2"));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds n = {n}")));
    }
    let idx = shuffled(n, seed);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let val = idx[start..start + len].to_vec();
        let train = idx[..start]
            .iter()
            .chain(&idx[start + len..])
            .copied()
            .collect();
        folds.push((train, val));
        start += len;
    }
    Ok(folds)
}
