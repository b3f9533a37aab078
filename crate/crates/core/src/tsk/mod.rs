//! TSK fuzzy classifiers with clustering-initialised Gaussian antecedents and
//! ridge least-squares consequents.

mod firing;
mod ridge;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::clustering::{argmax_rows, ClusteringModel};
use crate::dataset::Dataset;
use crate::{Error, Result};

pub use firing::{design_matrix, estimate_sigmas, log_firing_levels, normalized_firing, SpreadForm};
pub use ridge::{ridge_solve, RidgeSystem};

/// Lower bound on antecedent spreads.
pub const SIGMA_FLOOR: f64 = 1e-8;

/// Consequent order: constant or affine in the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    #[default]
    Zero,
    First,
}

impl std::str::FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" | "0" => Ok(Order::Zero),
            "first" | "1" => Ok(Order::First),
            other => Err(Error::invalid(format!("unknown consequent order `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TskConfig {
    pub order: Order,
    /// Spread scaling factor.
    pub h: f64,
    /// Ridge weight.
    pub lambda: f64,
    #[serde(default)]
    pub spread_form: SpreadForm,
}

impl TskConfig {
    pub fn new(order: Order, h: f64, lambda: f64) -> Self {
        Self {
            order,
            h,
            lambda,
            spread_form: SpreadForm::Literal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TskModel {
    /// R x D membership-function centers.
    pub centers: Array2<f64>,
    /// R x D membership-function spreads.
    pub sigmas: Array2<f64>,
    /// Consequents: R x C (zero order) or R(D+1) x C (first order).
    pub consequents: Array2<f64>,
    pub config: TskConfig,
    pub n_classes: usize,
    pub class_names: Vec<String>,
}

/// Builds a TSK classifier from a clustering fitted on `train.features`.
pub fn fit_tsk(train: &Dataset, clustering: &ClusteringModel, config: TskConfig) -> Result<TskModel> {
    if clustering.memberships.nrows() != train.n_samples() {
        return Err(Error::DimensionMismatch {
            expected: train.n_samples(),
            actual: clustering.memberships.nrows(),
        });
    }
    let x = train.features.view();
    let sigmas = estimate_sigmas(x, clustering.memberships.view(), clustering.centers.view(), config.h)?;
    let fbar = normalized_firing(
        log_firing_levels(x, clustering.centers.view(), sigmas.view(), config.spread_form)?.view(),
    );
    let design = design_matrix(fbar.view(), x, config.order)?;
    let consequents = ridge_solve(design.view(), train.onehot.view(), config.lambda)?;
    Ok(TskModel {
        centers: clustering.centers.clone(),
        sigmas,
        consequents,
        config,
        n_classes: train.n_classes,
        class_names: train.class_names.clone(),
    })
}

impl TskModel {
    pub fn n_rules(&self) -> usize {
        self.centers.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.centers.ncols()
    }

    /// Normalised firing levels of each rule.
    pub fn firing(&self, xt: ArrayView2<f64>) -> Result<Array2<f64>> {
        if xt.ncols() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: xt.ncols(),
            });
        }
        let log_f = log_firing_levels(xt, self.centers.view(), self.sigmas.view(), self.config.spread_form)?;
        Ok(normalized_firing(log_f.view()))
    }

    /// Class scores `X_hat B`.
    pub fn scores(&self, xt: ArrayView2<f64>) -> Result<Array2<f64>> {
        let fbar = self.firing(xt)?;
        Ok(design_matrix(fbar.view(), xt, self.config.order)?.dot(&self.consequents))
    }

    /// Scores and argmax labels (ties to the lowest class index).
    pub fn predict_tsk(&self, xt: ArrayView2<f64>) -> Result<(Array2<f64>, Vec<usize>)> {
        let scores = self.scores(xt)?;
        let labels = argmax_rows(scores.view());
        Ok((scores, labels))
    }

    pub fn predict(&self, xt: ArrayView2<f64>) -> Result<Vec<usize>> {
        Ok(self.predict_tsk(xt)?.1)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
