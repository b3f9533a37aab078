use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::{Order, SIGMA_FLOOR};
use crate::{Error, Result};

/// How the spread enters the Gaussian exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpreadForm {
    /// `exp(-(x - v)^2 / (2 sigma))`.
    #[default]
    Literal,
    /// `exp(-(x - v)^2 / (2 sigma^2))`.
    Squared,
}

/// Gaussian spreads `h * sqrt(sum_n U (x - v)^2 / sum_n U)`, weighted by `U`
/// (not `U^m`) and floored at [`SIGMA_FLOOR`]. A rule with no membership mass
/// falls back to `h` times the per-feature sample standard deviation.
pub fn estimate_sigmas(
    x: ArrayView2<f64>,
    memberships: ArrayView2<f64>,
    centers: ArrayView2<f64>,
    h: f64,
) -> Result<Array2<f64>> {
    let (n, d) = x.dim();
    let r_count = centers.nrows();
    if memberships.dim() != (n, r_count) {
        return Err(Error::invalid(format!(
            "memberships have shape {:?}, expected ({n}, {r_count})",
            memberships.dim()
        )));
    }
    if centers.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: centers.ncols(),
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("h must be > 0, got {h}")));
    }
    let mass = memberships.sum_axis(Axis(0));
    let mut sigma = Array2::<f64>::zeros((r_count, d));
    for (xi, ui) in x.rows().into_iter().zip(memberships.rows()) {
        for (r, &u) in ui.iter().enumerate() {
            if u == 0.0 {
                continue;
            }
            for ((s, &xv), &vv) in sigma.row_mut(r).iter_mut().zip(xi).zip(centers.row(r)) {
                *s += u * (xv - vv) * (xv - vv);
            }
        }
    }
    let global = if n > 1 {
        x.var_axis(Axis(0), 1.0).mapv(f64::sqrt)
    } else {
        ndarray::Array1::zeros(d)
    };
    for (r, mut row) in sigma.rows_mut().into_iter().enumerate() {
        if mass[r] > 0.0 {
            row.mapv_inplace(|s| h * (s / mass[r]).sqrt());
        } else {
            log::debug!("rule {r} has no membership mass; using global spreads");
            row.assign(&(&global * h));
        }
        row.mapv_inplace(|s| s.max(SIGMA_FLOOR));
    }
    Ok(sigma)
}

/// `log f_{n,r} = sum_d -(x_{n,d} - v_{r,d})^2 / (2 s_{r,d})` with
/// `s = sigma` or `sigma^2` according to `form`.
pub fn log_firing_levels(
    x: ArrayView2<f64>,
    centers: ArrayView2<f64>,
    sigmas: ArrayView2<f64>,
    form: SpreadForm,
) -> Result<Array2<f64>> {
    if centers.ncols() != x.ncols() {
        return Err(Error::DimensionMismatch {
            expected: centers.ncols(),
            actual: x.ncols(),
        });
    }
    let denom = match form {
        SpreadForm::Literal => sigmas.mapv(|s| 2.0 * s),
        SpreadForm::Squared => sigmas.mapv(|s| 2.0 * s * s),
    };
    let mut out = Array2::zeros((x.nrows(), centers.nrows()));
    for (xi, mut row) in x.rows().into_iter().zip(out.rows_mut()) {
        for (r, o) in row.iter_mut().enumerate() {
            *o = -xi
                .iter()
                .zip(centers.row(r))
                .zip(denom.row(r))
                .map(|((&a, &v), &s)| (a - v) * (a - v) / s)
                .sum::<f64>();
        }
    }
    Ok(out)
}

/// Row-wise softmax of log firing levels (log-sum-exp with max shift).
pub fn normalized_firing(log_f: ArrayView2<f64>) -> Array2<f64> {
    let mut out = log_f.to_owned();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        row.mapv_inplace(|v| (v - max).exp());
        let s = row.sum();
        row /= s;
    }
    out
}

/// Consequent design matrix. Zero order returns `fbar`; first order lays
/// out rule `r` as `[f_r, f_r x_1, ..., f_r x_D]`.
pub fn design_matrix(fbar: ArrayView2<f64>, x: ArrayView2<f64>, order: Order) -> Result<Array2<f64>> {
    if fbar.nrows() != x.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            actual: fbar.nrows(),
        });
    }
    match order {
        Order::Zero => Ok(fbar.to_owned()),
        Order::First => {
            let (n, r_count) = fbar.dim();
            let d = x.ncols();
            let block = d + 1;
            let mut out = Array2::zeros((n, r_count * block));
            for i in 0..n {
                for r in 0..r_count {
                    let f = fbar[[i, r]];
                    out[[i, r * block]] = f;
                    for j in 0..d {
                        out[[i, r * block + 1 + j]] = f * x[[i, j]];
                    }
                }
            }
            Ok(out)
        }
    }
}
