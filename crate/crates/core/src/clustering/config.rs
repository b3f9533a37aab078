use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Whether feature weights are learned or held at `1/D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    #[default]
    Learned,
    /// Plain FCM: every weight stays `1/D`.
    FrozenUniform,
}

/// How the cluster label distribution `Z` is normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZNormalization {
    /// `Z = Z'`: each cluster's membership-weighted class frequencies.
    #[default]
    Row,
    /// `Z'` divided by its column sums over clusters, then row-renormalised.
    PaperColumn,
}

/// Hyperparameters of the unified soft subspace clustering objective.
///
/// `beta = 0` gives ESSC, additionally `eta = 0` gives EWFCM, and
/// `weight_mode = FrozenUniform` on top of that gives FCM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringConfig {
    pub n_clusters: usize,
    /// Fuzzy index `m > 1`.
    pub fuzzifier: f64,
    /// Weight-entropy coefficient.
    pub gamma: f64,
    /// Between-cluster separation coefficient, `0 <= eta < 1`.
    pub eta: f64,
    /// Supervision (label log-loss) coefficient.
    pub beta: f64,
    pub max_iter: usize,
    /// Stop once the Frobenius norm of the center change drops below this.
    pub tol: f64,
    pub seed: u64,
    #[serde(default)]
    pub weight_mode: WeightMode,
    #[serde(default)]
    pub z_normalization: ZNormalization,
}

pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-5;

impl ClusteringConfig {
    pub fn sessc(n_clusters: usize, fuzzifier: f64, gamma: f64, eta: f64, beta: f64) -> Self {
        Self {
            n_clusters,
            fuzzifier,
            gamma,
            eta,
            beta,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            seed: 0,
            weight_mode: WeightMode::Learned,
            z_normalization: ZNormalization::Row,
        }
    }

    pub fn essc(n_clusters: usize, fuzzifier: f64, gamma: f64, eta: f64) -> Self {
        Self::sessc(n_clusters, fuzzifier, gamma, eta, 0.0)
    }

    pub fn ewfcm(n_clusters: usize, fuzzifier: f64, gamma: f64) -> Self {
        Self::sessc(n_clusters, fuzzifier, gamma, 0.0, 0.0)
    }

    /// `gamma` is irrelevant with frozen weights; it is set to 1.
    pub fn fcm(n_clusters: usize, fuzzifier: f64) -> Self {
        Self {
            weight_mode: WeightMode::FrozenUniform,
            ..Self::sessc(n_clusters, fuzzifier, 1.0, 0.0, 0.0)
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_z_normalization(mut self, mode: ZNormalization) -> Self {
        self.z_normalization = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_clusters == 0 {
            return Err(Error::invalid("n_clusters must be positive"));
        }
        if !(self.fuzzifier > 1.0 && self.fuzzifier.is_finite()) {
            return Err(Error::invalid(format!(
                "fuzzifier must be > 1, got {}",
                self.fuzzifier
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::invalid(format!("gamma must be > 0, got {}", self.gamma)));
        }
        if !(0.0..1.0).contains(&self.eta) {
            return Err(Error::invalid(format!("eta must lie in [0, 1), got {}", self.eta)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be >= 0, got {}", self.beta)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        Ok(())
    }
}
