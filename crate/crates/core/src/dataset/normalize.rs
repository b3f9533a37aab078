use ndarray::{Array1, Axis};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{Error, Result};

/// Lower bound applied to per-column standard deviations.
pub const STD_FLOOR: f64 = 1e-12;

/// Per-column z-score statistics estimated on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub means: Array1<f64>,
    /// Sample standard deviations (divisor N-1), floored at [`STD_FLOOR`].
    pub stds: Array1<f64>,
}

/// Estimates column means and sample standard deviations on `train`.
pub fn fit_zscore(train: &Dataset) -> Normalizer {
    let x = &train.features;
    let n = x.nrows();
    let means = x.mean_axis(Axis(0)).expect("dataset is nonempty");
    let stds = if n > 1 {
        x.var_axis(Axis(0), 1.0).mapv(|v| v.sqrt().max(STD_FLOOR))
    } else {
        Array1::from_elem(x.ncols(), STD_FLOOR)
    };
    Normalizer { means, stds }
}

impl Normalizer {
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, x: &ndarray::Array2<f64>) -> Result<ndarray::Array2<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.ncols(),
            });
        }
        Ok((x - &self.means) / &self.stds)
    }

    /// Returns a copy of `data` with normalised features.
    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        data.with_features(self.transform(&data.features)?)
    }
}
