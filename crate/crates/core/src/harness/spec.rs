use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clustering::{ClusteringConfig, ZNormalization, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::dataset::{generate_synthetic, load_table, Dataset, LabelColumn, SyntheticKind};
use crate::tsk::{Order, SpreadForm};
use crate::{Error, Result};

/// Which clustering initialises the classifier, and how it is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    FcmLse,
    EwfcmLse,
    EsscLse,
    /// The supervised clustering used directly as a classifier.
    Sessc,
    SesscLse,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::FcmLse,
        Algorithm::EwfcmLse,
        Algorithm::EsscLse,
        Algorithm::Sessc,
        Algorithm::SesscLse,
    ];

    /// Whether `param` is tuned for this algorithm.
    pub fn uses(self, param: Param) -> bool {
        use Algorithm::*;
        match param {
            Param::H | Param::Lambda => self != Sessc,
            Param::Gamma => self != FcmLse,
            Param::Eta => matches!(self, EsscLse | Sessc | SesscLse),
            Param::Beta => matches!(self, Sessc | SesscLse),
        }
    }

    pub fn is_tsk(self) -> bool {
        self != Algorithm::Sessc
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "fcm_lse" => Ok(Algorithm::FcmLse),
            "ewfcm_lse" => Ok(Algorithm::EwfcmLse),
            "essc_lse" => Ok(Algorithm::EsscLse),
            "sessc" => Ok(Algorithm::Sessc),
            "sessc_lse" => Ok(Algorithm::SesscLse),
            other => Err(Error::invalid(format!("unknown algorithm `{other}`"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::FcmLse => "fcm_lse",
            Algorithm::EwfcmLse => "ewfcm_lse",
            Algorithm::EsscLse => "essc_lse",
            Algorithm::Sessc => "sessc",
            Algorithm::SesscLse => "sessc_lse",
        })
    }
}

/// Tunable continuous hyperparameters, in grid enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    H,
    Lambda,
    Gamma,
    Eta,
    Beta,
}

impl Param {
    pub const ALL: [Param; 5] = [Param::H, Param::Lambda, Param::Gamma, Param::Eta, Param::Beta];
}

/// Search grids. Points are enumerated with `h` outermost and `beta`
/// innermost; the first point reaching the best CV score wins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Grids {
    pub h: Vec<f64>,
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
    pub eta: Vec<f64>,
    pub beta: Vec<f64>,
}

impl Default for Grids {
    fn default() -> Self {
        Self {
            h: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            lambda: vec![1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0],
            gamma: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            eta: vec![0.01, 0.05, 0.1, 0.3, 0.5],
            beta: vec![0.01, 0.1, 1.0, 10.0, 100.0],
        }
    }
}

impl Grids {
    pub fn values(&self, param: Param) -> &[f64] {
        match param {
            Param::H => &self.h,
            Param::Lambda => &self.lambda,
            Param::Gamma => &self.gamma,
            Param::Eta => &self.eta,
            Param::Beta => &self.beta,
        }
    }

    pub fn values_mut(&mut self, param: Param) -> &mut Vec<f64> {
        match param {
            Param::H => &mut self.h,
            Param::Lambda => &mut self.lambda,
            Param::Gamma => &mut self.gamma,
            Param::Eta => &mut self.eta,
            Param::Beta => &mut self.beta,
        }
    }

    /// Number of grid points searched for `algorithm` in one stage.
    pub fn size_for(&self, algorithm: Algorithm) -> usize {
        Param::ALL
            .iter()
            .filter(|&&p| algorithm.uses(p))
            .map(|&p| self.values(p).len())
            .product()
    }
}

/// One hyperparameter assignment. Entries not used by the algorithm are
/// `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ParamPoint {
    pub h: Option<f64>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub beta: Option<f64>,
}

impl ParamPoint {
    /// Fixed values used for sweeps: `gamma = 10, eta = 0.1, beta = 1,
    /// lambda = 0.01, h = 100`.
    pub fn sweep_defaults() -> Self {
        Self {
            h: Some(100.0),
            lambda: Some(0.01),
            gamma: Some(10.0),
            eta: Some(0.1),
            beta: Some(1.0),
        }
    }

    pub fn get(&self, param: Param) -> Option<f64> {
        match param {
            Param::H => self.h,
            Param::Lambda => self.lambda,
            Param::Gamma => self.gamma,
            Param::Eta => self.eta,
            Param::Beta => self.beta,
        }
    }

    pub fn set(&mut self, param: Param, value: Option<f64>) {
        match param {
            Param::H => self.h = value,
            Param::Lambda => self.lambda = value,
            Param::Gamma => self.gamma = value,
            Param::Eta => self.eta = value,
            Param::Beta => self.beta = value,
        }
    }

    /// Copy with unused entries cleared; errors if a used entry is missing.
    pub fn restricted_to(&self, algorithm: Algorithm) -> Result<ParamPoint> {
        let mut out = ParamPoint::default();
        for p in Param::ALL {
            if algorithm.uses(p) {
                let v = self.get(p).ok_or_else(|| {
                    Error::invalid(format!("{algorithm} needs a value for {p:?}"))
                })?;
                out.set(p, Some(v));
            }
        }
        Ok(out)
    }
}

/// Where an experiment's data comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum DatasetSource {
    Table {
        path: PathBuf,
        #[serde(default)]
        label_column: LabelColumn,
        #[serde(default)]
        categorical: Vec<String>,
    },
    Synthetic {
        kind: SyntheticKind,
        n: usize,
        #[serde(default)]
        noise: f64,
        #[serde(default)]
        seed: u64,
    },
}

impl DatasetSource {
    pub fn load(&self) -> Result<Dataset> {
        match self {
            DatasetSource::Table {
                path,
                label_column,
                categorical,
            } => load_table(path, label_column, categorical),
            DatasetSource::Synthetic { kind, n, noise, seed } => {
                generate_synthetic(*kind, *n, *noise, *seed)
            }
        }
    }
}

fn default_rules() -> usize {
    30
}
fn default_splits() -> usize {
    30
}
fn default_fraction() -> f64 {
    0.7
}
fn default_folds() -> usize {
    5
}
fn default_max_iter() -> usize {
    DEFAULT_MAX_ITER
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// Full description of a benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub dataset: DatasetSource,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub order: Order,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default = "default_rules")]
    pub n_rules: usize,
    #[serde(default = "default_splits")]
    pub n_splits: usize,
    #[serde(default = "default_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_folds")]
    pub cv_folds: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// When set, grid search is skipped and these values are used.
    #[serde(default)]
    pub fixed: Option<ParamPoint>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub z_normalization: ZNormalization,
    #[serde(default)]
    pub spread_form: SpreadForm,
}

impl ExperimentSpec {
    pub fn new(dataset: DatasetSource, algorithm: Algorithm) -> Self {
        Self {
            dataset,
            algorithm,
            order: Order::Zero,
            grids: Grids::default(),
            n_rules: default_rules(),
            n_splits: default_splits(),
            train_fraction: default_fraction(),
            cv_folds: default_folds(),
            master_seed: 0,
            fixed: None,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            z_normalization: ZNormalization::Row,
            spread_form: SpreadForm::Literal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_rules == 0 {
            return Err(Error::invalid("n_rules must be positive"));
        }
        if self.n_splits == 0 {
            return Err(Error::invalid("n_splits must be positive"));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::invalid("train_fraction must lie in (0, 1)"));
        }
        if self.cv_folds < 2 {
            return Err(Error::invalid("cv_folds must be at least 2"));
        }
        for p in Param::ALL {
            if !self.algorithm.uses(p) {
                continue;
            }
            let values = self.grids.values(p);
            if self.fixed.is_none() && values.is_empty() {
                return Err(Error::invalid(format!("empty grid for {p:?}")));
            }
            let fixed = self.fixed.and_then(|f| f.get(p));
            for &v in values.iter().chain(fixed.iter()) {
                check_value(p, v)?;
            }
        }
        if let Some(f) = self.fixed {
            f.restricted_to(self.algorithm)?;
        }
        Ok(())
    }

    /// Clustering configuration for one hyperparameter assignment.
    pub fn clustering_config(
        &self,
        algorithm: Algorithm,
        point: &ParamPoint,
        fuzzifier: f64,
        seed: u64,
    ) -> Result<ClusteringConfig> {
        let r = self.n_rules;
        let need = |p: Param| {
            point
                .get(p)
                .ok_or_else(|| Error::invalid(format!("{algorithm} needs a value for {p:?}")))
        };
        let base = match algorithm {
            Algorithm::FcmLse => ClusteringConfig::fcm(r, fuzzifier),
            Algorithm::EwfcmLse => ClusteringConfig::ewfcm(r, fuzzifier, need(Param::Gamma)?),
            Algorithm::EsscLse => {
                ClusteringConfig::essc(r, fuzzifier, need(Param::Gamma)?, need(Param::Eta)?)
            }
            Algorithm::Sessc | Algorithm::SesscLse => ClusteringConfig::sessc(
                r,
                fuzzifier,
                need(Param::Gamma)?,
                need(Param::Eta)?,
                need(Param::Beta)?,
            ),
        };
        let cfg = base
            .with_seed(seed)
            .with_max_iter(self.max_iter)
            .with_tol(self.tol)
            .with_z_normalization(self.z_normalization);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_value(p: Param, v: f64) -> Result<()> {
    let ok = match p {
        Param::H | Param::Lambda | Param::Gamma => v > 0.0 && v.is_finite(),
        Param::Eta => (0.0..1.0).contains(&v),
        Param::Beta => v >= 0.0 && v.is_finite(),
    };
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!("{v} is not admissible for {p:?}")))
    }
}

/// Fuzzy index `k / (k - 2)` with `k = min(N, D - 1)` when `k > 2`, else 2.
pub fn fuzzy_index(n: usize, d: usize) -> f64 {
    let k = n.min(d.saturating_sub(1));
    if k > 2 {
        k as f64 / (k as f64 - 2.0)
    } else {
        2.0
    }
}

/// Child seed for stream `stream` of `parent` (SplitMix64 finaliser applied
/// to `parent + (stream + 1) * 0x9E3779B97F4A7C15`).
pub fn derive_seed(parent: u64, stream: u64) -> u64 {
    let mut z = parent.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
