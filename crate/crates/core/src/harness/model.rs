use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::spec::{fuzzy_index, Algorithm, ExperimentSpec, ParamPoint};
use crate::clustering::{fit, ClusteringModel};
use crate::dataset::{Dataset, Normalizer};
use crate::tsk::{fit_tsk, TskConfig, TskModel};
use crate::{Error, Result};

/// Anything that maps feature rows to class indices.
pub trait Classifier {
    fn n_features(&self) -> usize;
    fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<usize>>;
}

impl Classifier for ClusteringModel {
    fn n_features(&self) -> usize {
        ClusteringModel::n_features(self)
    }

    fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        ClusteringModel::predict(self, x)
    }
}

impl Classifier for TskModel {
    fn n_features(&self) -> usize {
        TskModel::n_features(self)
    }

    fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        TskModel::predict(self, x)
    }
}

/// A fitted classifier of either kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    Sessc(ClusteringModel),
    Tsk {
        clustering: ClusteringModel,
        tsk: TskModel,
    },
}

impl TrainedModel {
    pub fn clustering(&self) -> &ClusteringModel {
        match self {
            TrainedModel::Sessc(c) => c,
            TrainedModel::Tsk { clustering, .. } => clustering,
        }
    }
}

impl Classifier for TrainedModel {
    fn n_features(&self) -> usize {
        self.clustering().n_features()
    }

    fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        match self {
            TrainedModel::Sessc(c) => c.predict(x),
            TrainedModel::Tsk { tsk, .. } => tsk.predict(x),
        }
    }
}

/// Fits `algorithm` on `train` with the given hyperparameters.
pub fn train_model(
    train: &Dataset,
    spec: &ExperimentSpec,
    algorithm: Algorithm,
    point: &ParamPoint,
    seed: u64,
) -> Result<TrainedModel> {
    let m = fuzzy_index(train.n_samples(), train.n_features());
    let cfg = spec.clustering_config(algorithm, point, m, seed)?;
    let clustering = fit(train.features.view(), train.onehot.view(), &cfg)?;
    if !algorithm.is_tsk() {
        return Ok(TrainedModel::Sessc(clustering));
    }
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| Error::invalid(format!("{algorithm} needs a value for {name}")))
    };
    let mut tsk_cfg = TskConfig::new(spec.order, need(point.h, "h")?, need(point.lambda, "lambda")?);
    tsk_cfg.spread_form = spec.spread_form;
    let tsk = fit_tsk(train, &clustering, tsk_cfg)?;
    Ok(TrainedModel::Tsk { clustering, tsk })
}

/// Z-score normalisation followed by a fitted classifier, operating on raw
/// features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub normalizer: Normalizer,
    pub model: TrainedModel,
}

impl Pipeline {
    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.normalizer.transform(&x.to_owned())
    }
}

impl Classifier for Pipeline {
    fn n_features(&self) -> usize {
        self.normalizer.dim()
    }

    fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<usize>> {
        self.model.predict(self.transform(x)?.view())
    }
}
