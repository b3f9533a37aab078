use ndarray::{Array2, ArrayView2, Axis};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

const LLOYD_MAX_ITER: usize = 100;
const DUPLICATE_JITTER: f64 = 1e-6;

fn sq_dist(a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(x: ndarray::ArrayView1<f64>, centers: &Array2<f64>) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (r, c) in centers.rows().into_iter().enumerate() {
        let d = sq_dist(x, c);
        if d < best.1 {
            best = (r, d);
        }
    }
    best
}

/// Initial centers from k-means++ seeding followed by Lloyd iterations.
///
/// Lloyd stops at a fixed point of the assignment or after 100 rounds.
/// Centers that coincide (fewer than `k` distinct rows) are jittered by up
/// to `1e-6` per coordinate.
pub fn kmeans_init(x: ArrayView2<f64>, k: usize, seed: u64) -> Result<Array2<f64>> {
    let (n, d) = x.dim();
    if k == 0 {
        return Err(Error::invalid("k-means needs k >= 1"));
    }
    if k > n {
        return Err(Error::invalid(format!("cannot seed {k} centers from {n} rows")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = Array2::zeros((k, d));
    centers.row_mut(0).assign(&x.row(rng.random_range(0..n)));

    let mut closest: Vec<f64> = x.rows().into_iter().map(|row| sq_dist(row, centers.row(0))).collect();
    for j in 1..k {
        let total: f64 = closest.iter().sum();
        let pick = if total > 0.0 && total.is_finite() {
            WeightedIndex::new(&closest)
                .expect("weights are finite and not all zero")
                .sample(&mut rng)
        } else {
            rng.random_range(0..n)
        };
        centers.row_mut(j).assign(&x.row(pick));
        for (c, row) in closest.iter_mut().zip(x.rows()) {
            *c = c.min(sq_dist(row, centers.row(j)));
        }
    }

    let mut jittered = 0;
    for j in 1..k {
        let duplicate = (0..j).any(|i| centers.row(i) == centers.row(j));
        if duplicate {
            for v in centers.row_mut(j).iter_mut() {
                *v += rng.random_range(-DUPLICATE_JITTER..DUPLICATE_JITTER);
            }
            jittered += 1;
        }
    }
    if jittered > 0 {
        log::warn!("k-means: {jittered} duplicate initial centers jittered");
    }

    let mut assign = vec![usize::MAX; n];
    for _ in 0..LLOYD_MAX_ITER {
        let mut changed = false;
        for (i, row) in x.rows().into_iter().enumerate() {
            let (r, _) = nearest(row, &centers);
            if assign[i] != r {
                assign[i] = r;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = Array2::<f64>::zeros((k, d));
        let mut counts = vec![0usize; k];
        for (i, row) in x.rows().into_iter().enumerate() {
            let mut s = sums.row_mut(assign[i]);
            s += &row;
            counts[assign[i]] += 1;
        }
        for (r, mut c) in centers.axis_iter_mut(Axis(0)).enumerate() {
            if counts[r] > 0 {
                c.assign(&(&sums.row(r) / counts[r] as f64));
            }
        }
    }
    Ok(centers)
}
