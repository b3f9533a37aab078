//! Closed-form block updates of the alternating minimisation.
//!
//! Each function minimises the clustering objective over one block (U, V, W
//! or Z) with the other blocks held fixed.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use super::config::{ClusteringConfig, WeightMode, ZNormalization};
use crate::{Error, Result};

/// Floor applied to `Z` entries before taking logarithms.
pub const Z_FLOOR: f64 = 1e-12;
/// Floor applied to test-time distances before raising to `-1/(m-1)`.
pub const DISTANCE_FLOOR: f64 = 1e-12;

/// `sum_d w_d (x_d - v_d)^2`.
pub fn weighted_sq_distance(x: &[f64], v: &[f64], w: &[f64]) -> Result<f64> {
    if v.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: v.len(),
        });
    }
    if w.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: w.len(),
        });
    }
    Ok(weighted_sq(x.iter(), v.iter(), w.iter()))
}

#[inline]
fn weighted_sq<'a>(
    x: impl Iterator<Item = &'a f64>,
    v: impl Iterator<Item = &'a f64>,
    w: impl Iterator<Item = &'a f64>,
) -> f64 {
    x.zip(v).zip(w).map(|((a, b), c)| c * (a - b) * (a - b)).sum()
}

/// N x R matrix of `||x_n - v_r||^2_{w_r}`.
pub(crate) fn weighted_distances(
    x: ArrayView2<f64>,
    centers: ArrayView2<f64>,
    weights: ArrayView2<f64>,
) -> Array2<f64> {
    let (n, r) = (x.nrows(), centers.nrows());
    let mut out = Array2::zeros((n, r));
    for (xi, mut row) in x.rows().into_iter().zip(out.rows_mut()) {
        for (k, o) in row.iter_mut().enumerate() {
            *o = weighted_sq(xi.iter(), centers.row(k).iter(), weights.row(k).iter());
        }
    }
    out
}

/// `||v_r - v_0||^2_{w_r}` per cluster.
pub(crate) fn separations(
    centers: ArrayView2<f64>,
    weights: ArrayView2<f64>,
    global_center: ArrayView1<f64>,
) -> Array1<f64> {
    centers
        .rows()
        .into_iter()
        .zip(weights.rows())
        .map(|(v, w)| weighted_sq(v.iter(), global_center.iter(), w.iter()))
        .collect()
}

/// N x R matrix of `-sum_c Y_{n,c} ln Z_{r,c}`.
pub(crate) fn label_losses(y: ArrayView2<f64>, z: ArrayView2<f64>) -> Array2<f64> {
    let log_z = z.mapv(|v| v.max(Z_FLOOR).ln());
    -y.dot(&log_z.t())
}

/// One simplex row from dissimilarities: `u_r ∝ d_r^{-1/(m-1)}`, computed
/// in log space.
///
/// When some `d_r <= 0` the row minimising `sum_r u_r^m d_r` is the vertex
/// at the smallest `d_r`, so all mass goes there (split evenly on ties).
/// With a single nonpositive entry this is the same as clipping it to zero.
pub(crate) fn memberships_from_dissimilarities(d: ArrayView1<f64>, m: f64, out: &mut [f64]) {
    let min = d.fold(f64::INFINITY, |a, &b| a.min(b));
    if min <= 0.0 {
        let ties = d.iter().filter(|&&v| v == min).count();
        let share = 1.0 / ties as f64;
        for (o, &v) in out.iter_mut().zip(d) {
            *o = if v == min { share } else { 0.0 };
        }
        return;
    }
    let exponent = -1.0 / (m - 1.0);
    let mut max = f64::NEG_INFINITY;
    for (o, &v) in out.iter_mut().zip(d) {
        *o = exponent * v.ln();
        max = max.max(*o);
    }
    let mut sum = 0.0;
    for o in out.iter_mut() {
        *o = (*o - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

/// Membership update. `D_{n,r} = ||x_n - v_r||^2_w - eta ||v_r - v0||^2_w
/// - beta sum_c Y_{n,c} ln Z_{r,c}` and `U_{n,r} ∝ D_{n,r}^{-1/(m-1)}`; rows
/// with a nonpositive `D` put all mass on their smallest entry.
///
/// Labels are not read when `beta == 0`.
pub fn update_memberships(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    centers: ArrayView2<f64>,
    weights: ArrayView2<f64>,
    cluster_labels: ArrayView2<f64>,
    global_center: ArrayView1<f64>,
    config: &ClusteringConfig,
) -> Result<Array2<f64>> {
    let mut dis = weighted_distances(x, centers, weights);
    if config.eta != 0.0 {
        let sep = separations(centers, weights, global_center);
        dis -= &(sep * config.eta);
    }
    if config.beta != 0.0 {
        dis.scaled_add(config.beta, &label_losses(y, cluster_labels));
    }
    if let Some(bad) = dis.iter().find(|v| !v.is_finite()) {
        return Err(Error::Diverged {
            iteration: 0,
            what: format!("non-finite membership dissimilarity {bad}"),
        });
    }
    let mut u = Array2::zeros(dis.dim());
    for (drow, mut urow) in dis.rows().into_iter().zip(u.rows_mut()) {
        memberships_from_dissimilarities(
            drow,
            config.fuzzifier,
            urow.as_slice_mut().expect("row is contiguous"),
        );
    }
    Ok(u)
}

/// Center update `V_{r,d} = sum_n U^m (X_{n,d} - eta v0_d) / ((1 - eta) sum_n U^m)`.
///
/// A cluster with zero total `U^m` keeps its row of `previous`.
pub fn update_centers(
    x: ArrayView2<f64>,
    memberships: ArrayView2<f64>,
    global_center: ArrayView1<f64>,
    previous: ArrayView2<f64>,
    config: &ClusteringConfig,
) -> Array2<f64> {
    let um = memberships.mapv(|u| u.powf(config.fuzzifier));
    let mass = um.sum_axis(Axis(0));
    let weighted = um.t().dot(&x);
    let eta = config.eta;
    let mut centers = previous.to_owned();
    for (r, mut row) in centers.rows_mut().into_iter().enumerate() {
        if mass[r] > 0.0 {
            let denom = (1.0 - eta) * mass[r];
            for (d, v) in row.iter_mut().enumerate() {
                *v = (weighted[[r, d]] - eta * global_center[d] * mass[r]) / denom;
            }
        } else {
            log::debug!("cluster {r} has no membership mass; center left unchanged");
        }
    }
    centers
}

/// Weight update `W_{r,.} = softmax(-S_{r,.} / gamma)` with
/// `S_{r,d} = sum_n U^m [(X_{n,d} - V_{r,d})^2 - eta (V_{r,d} - v0_d)^2]`.
///
/// Returns `1/D` everywhere under [`WeightMode::FrozenUniform`].
pub fn update_weights(
    x: ArrayView2<f64>,
    memberships: ArrayView2<f64>,
    centers: ArrayView2<f64>,
    global_center: ArrayView1<f64>,
    config: &ClusteringConfig,
) -> Result<Array2<f64>> {
    let (r_count, d_count) = centers.dim();
    if config.weight_mode == WeightMode::FrozenUniform {
        return Ok(Array2::from_elem((r_count, d_count), 1.0 / d_count as f64));
    }
    let um = memberships.mapv(|u| u.powf(config.fuzzifier));
    let mass = um.sum_axis(Axis(0));
    let mut scatter = Array2::<f64>::zeros((r_count, d_count));
    for (xi, umi) in x.rows().into_iter().zip(um.rows()) {
        for (r, &w) in umi.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for ((s, &xv), &vv) in scatter.row_mut(r).iter_mut().zip(xi).zip(centers.row(r)) {
                *s += w * (xv - vv) * (xv - vv);
            }
        }
    }
    let mut weights = Array2::zeros((r_count, d_count));
    for r in 0..r_count {
        let mut row = weights.row_mut(r);
        for d in 0..d_count {
            let sep = centers[[r, d]] - global_center[d];
            let s = scatter[[r, d]] - config.eta * mass[r] * sep * sep;
            if !s.is_finite() {
                return Err(Error::Diverged {
                    iteration: 0,
                    what: format!("non-finite weight statistic in cluster {r}"),
                });
            }
            row[d] = -s / config.gamma;
        }
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row /= sum;
    }
    Ok(weights)
}

/// Cluster label update. `Z'_{r,c} = sum_n U^m Y_{n,c} / sum_n U^m`; under
/// [`ZNormalization::PaperColumn`] `Z'` is further divided by its column
/// sums. Entries are floored at [`Z_FLOOR`] and rows renormalised.
pub fn update_cluster_labels(
    y: ArrayView2<f64>,
    memberships: ArrayView2<f64>,
    config: &ClusteringConfig,
) -> Array2<f64> {
    let um = memberships.mapv(|u| u.powf(config.fuzzifier));
    let mass = um.sum_axis(Axis(0));
    let c_count = y.ncols();
    let mut z = um.t().dot(&y);
    for (r, mut row) in z.rows_mut().into_iter().enumerate() {
        if mass[r] > 0.0 {
            row /= mass[r];
        } else {
            log::debug!("cluster {r} has no membership mass; label distribution set uniform");
            row.fill(1.0 / c_count as f64);
        }
    }
    if config.z_normalization == ZNormalization::PaperColumn {
        let col = z.sum_axis(Axis(0));
        for mut row in z.rows_mut() {
            for (v, &s) in row.iter_mut().zip(&col) {
                if s > 0.0 {
                    *v /= s;
                }
            }
        }
    }
    floor_and_normalize_rows(&mut z);
    z
}

pub(crate) fn floor_and_normalize_rows(z: &mut Array2<f64>) {
    for mut row in z.rows_mut() {
        row.mapv_inplace(|v| v.max(Z_FLOOR));
        let s = row.sum();
        row /= s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array1};

    fn cfg(m: f64, eta: f64, beta: f64) -> ClusteringConfig {
        ClusteringConfig::sessc(2, m, 1.0, eta, beta)
    }

    #[test]
    fn distance_cases() {
        assert_eq!(weighted_sq_distance(&[1.0, 2.0], &[1.0, 2.0], &[0.5, 0.5]).unwrap(), 0.0);
        assert_eq!(weighted_sq_distance(&[1.0, 0.0], &[0.0, 0.0], &[0.3, 0.7]).unwrap(), 0.3);
        let x = [1.0, -2.0, 3.0];
        let v = [0.5, 1.0, -1.0];
        let plain: f64 = x.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum();
        let w = [1.0 / 3.0; 3];
        assert!((weighted_sq_distance(&x, &v, &w).unwrap() - plain / 3.0).abs() < 1e-12);
        assert!(weighted_sq_distance(&x, &v[..2], &w).is_err());
    }

    #[test]
    fn single_cluster_memberships_are_one() {
        let x = array![[0.0, 1.0], [2.0, 3.0], [4.0, -1.0]];
        let y = array![[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]];
        let v = array![[1.0, 1.0]];
        let w = array![[0.5, 0.5]];
        let z = array![[0.5, 0.5]];
        let c = ClusteringConfig::sessc(1, 2.0, 1.0, 0.1, 0.5);
        let u = update_memberships(x.view(), y.view(), v.view(), w.view(), z.view(), Array1::zeros(2).view(), &c)
            .unwrap();
        assert!(u.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn zero_distance_takes_all_mass() {
        let x = array![[0.0], [1.0]];
        let y = array![[1.0, 0.0], [0.0, 1.0]];
        let v = array![[0.0], [1.0]];
        let w = array![[1.0], [1.0]];
        let z = array![[0.5, 0.5], [0.5, 0.5]];
        let u = update_memberships(
            x.view(),
            y.view(),
            v.view(),
            w.view(),
            z.view(),
            array![0.5].view(),
            &cfg(2.0, 0.0, 0.0),
        )
        .unwrap();
        assert_eq!(u, array![[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn two_by_two_hand_value() {
        let x = array![[0.25], [0.75]];
        let y = array![[1.0, 0.0], [0.0, 1.0]];
        let v = array![[0.0], [1.0]];
        let w = array![[1.0], [1.0]];
        let z = array![[0.5, 0.5], [0.5, 0.5]];
        let u = update_memberships(
            x.view(),
            y.view(),
            v.view(),
            w.view(),
            z.view(),
            array![0.5].view(),
            &cfg(2.0, 0.0, 0.0),
        )
        .unwrap();
        let expected = (1.0 / 0.0625) / (1.0 / 0.0625 + 1.0 / 0.5625);
        assert!((u[[0, 0]] - expected).abs() < 1e-12);
        assert!((u[[1, 1]] - expected).abs() < 1e-12);
    }

    #[test]
    fn hard_memberships_give_cluster_means() {
        let x = array![[0.0, 0.0], [2.0, 4.0], [10.0, 10.0], [12.0, 14.0]];
        let u = array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]];
        let v0 = x.mean_axis(Axis(0)).unwrap();
        let prev = Array2::zeros((2, 2));
        let v = update_centers(x.view(), u.view(), v0.view(), prev.view(), &cfg(2.0, 0.0, 0.0));
        assert_eq!(v, array![[1.0, 2.0], [11.0, 12.0]]);
    }

    #[test]
    fn empty_cluster_keeps_previous_center() {
        let x = array![[1.0], [3.0]];
        let u = array![[1.0, 0.0], [1.0, 0.0]];
        let prev = array![[0.0], [42.0]];
        let v = update_centers(x.view(), u.view(), array![2.0].view(), prev.view(), &cfg(2.0, 0.0, 0.0));
        assert_eq!(v, array![[2.0], [42.0]]);
    }

    #[test]
    fn constant_scatter_gives_uniform_weights() {
        // Both features have identical spread around the center.
        let x = array![[1.0, 1.0], [-1.0, -1.0]];
        let u = array![[1.0], [1.0]];
        let v = array![[0.0, 0.0]];
        let c = ClusteringConfig::sessc(1, 2.0, 0.7, 0.0, 0.0);
        let w = update_weights(x.view(), u.view(), v.view(), array![0.0, 0.0].view(), &c).unwrap();
        assert!((w[[0, 0]] - 0.5).abs() < 1e-15 && (w[[0, 1]] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn huge_gamma_is_nearly_uniform() {
        let x = array![[1.0, 5.0, 0.0], [-1.0, -3.0, 0.1], [0.5, 2.0, 0.0]];
        let u = array![[1.0], [1.0], [1.0]];
        let v = array![[0.0, 0.0, 0.0]];
        let c = ClusteringConfig::sessc(1, 2.0, 1e6, 0.0, 0.0);
        let w = update_weights(x.view(), u.view(), v.view(), array![0.0, 0.0, 0.0].view(), &c).unwrap();
        assert!(w.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-4));
    }

    #[test]
    fn extreme_scatter_does_not_overflow() {
        let x = array![[1e6, 0.0], [-1e6, 0.0]];
        let u = array![[1.0], [1.0]];
        let v = array![[0.0, 0.0]];
        let c = ClusteringConfig::sessc(1, 2.0, 1e-3, 0.0, 0.0);
        let w = update_weights(x.view(), u.view(), v.view(), array![0.0, 0.0].view(), &c).unwrap();
        assert_eq!(w, array![[0.0, 1.0]]);
    }

    #[test]
    fn frozen_weights_are_uniform() {
        let x = array![[1.0, 5.0], [-1.0, -3.0]];
        let u = array![[1.0], [1.0]];
        let v = array![[0.0, 0.0]];
        let w = update_weights(
            x.view(),
            u.view(),
            v.view(),
            array![0.0, 0.0].view(),
            &ClusteringConfig::fcm(1, 2.0),
        )
        .unwrap();
        assert_eq!(w, array![[0.5, 0.5]]);
    }

    #[test]
    fn pure_cluster_label_distribution() {
        let y = array![[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]];
        let u = array![[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]];
        let z = update_cluster_labels(y.view(), u.view(), &cfg(2.0, 0.0, 1.0));
        assert!((z[[0, 0]] - 1.0).abs() < 1e-11 && (z[[1, 1]] - 1.0).abs() < 1e-11);
        assert!(z.rows().into_iter().all(|r| (r.sum() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn weighted_label_frequencies() {
        // U^m column [1, 1, 2] with m = 2.
        let y = array![[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]];
        let u = array![[1.0], [1.0], [2f64.sqrt()]];
        let c = ClusteringConfig::sessc(1, 2.0, 1.0, 0.0, 1.0);
        let z = update_cluster_labels(y.view(), u.view(), &c);
        assert!((z[[0, 0]] - 0.25).abs() < 1e-12 && (z[[0, 1]] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn uniform_memberships_on_balanced_data() {
        let y = array![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let u = Array2::from_elem((3, 2), 0.5);
        for mode in [ZNormalization::Row, ZNormalization::PaperColumn] {
            let z = update_cluster_labels(y.view(), u.view(), &cfg(2.0, 0.0, 1.0).with_z_normalization(mode));
            assert!(z.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-12));
        }
    }

    #[test]
    fn empty_cluster_label_distribution_is_uniform() {
        let y = array![[1.0, 0.0], [0.0, 1.0]];
        let u = array![[1.0, 0.0], [1.0, 0.0]];
        let z = update_cluster_labels(y.view(), u.view(), &cfg(2.0, 0.0, 1.0));
        assert_eq!(z.row(1).to_vec(), vec![0.5, 0.5]);
    }
}
