use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};

use crate::{Error, Result};

fn to_na(a: ArrayView2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Normal equations `(X^T X + lambda I) B = X^T Y` with the Gram matrix
/// and right-hand side cached, so several ridge weights can be solved for
/// the same design matrix.
#[derive(Debug, Clone)]
pub struct RidgeSystem {
    gram: DMatrix<f64>,
    rhs: DMatrix<f64>,
}

impl RidgeSystem {
    pub fn new(design: ArrayView2<f64>, targets: ArrayView2<f64>) -> Result<Self> {
        if design.nrows() != targets.nrows() {
            return Err(Error::DimensionMismatch {
                expected: design.nrows(),
                actual: targets.nrows(),
            });
        }
        if design.iter().chain(targets.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("ridge inputs contain non-finite values"));
        }
        let x = to_na(design);
        let y = to_na(targets);
        Ok(Self {
            gram: x.tr_mul(&x),
            rhs: x.tr_mul(&y),
        })
    }

    /// Solves by Cholesky factorisation of `X^T X + lambda I`.
    pub fn solve(&self, lambda: f64) -> Result<Array2<f64>> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(format!("ridge weight must be > 0, got {lambda}")));
        }
        let mut a = self.gram.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += lambda;
        }
        let chol = a.cholesky().ok_or(Error::NotPositiveDefinite)?;
        let b = chol.solve(&self.rhs);
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Array2::from_shape_fn((b.nrows(), b.ncols()), |(i, j)| b[(i, j)]))
    }
}

/// `B = (X^T X + lambda I)^{-1} X^T Y`.
pub fn ridge_solve(design: ArrayView2<f64>, targets: ArrayView2<f64>, lambda: f64) -> Result<Array2<f64>> {
    RidgeSystem::new(design, targets)?.solve(lambda)
}
