//! Unified soft subspace clustering solver (FCM / EWFCM / ESSC / SESSC) and
//! the SESSC standalone classifier.

mod config;
mod kmeans;
mod objective;
mod updates;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use config::{ClusteringConfig, WeightMode, ZNormalization, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use kmeans::kmeans_init;
pub use objective::ObjectiveTerms;
pub use updates::{
    update_centers, update_cluster_labels, update_memberships, update_weights,
    weighted_sq_distance, DISTANCE_FLOOR, Z_FLOOR,
};

/// Fitted clustering state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringModel {
    /// R x D cluster centers.
    pub centers: Array2<f64>,
    /// R x D feature weights; rows on the simplex.
    pub weights: Array2<f64>,
    /// N x R training memberships; rows on the simplex.
    pub memberships: Array2<f64>,
    /// R x C cluster label distributions; rows on the simplex.
    pub cluster_labels: Array2<f64>,
    /// Column mean of the training features.
    pub global_center: Array1<f64>,
    pub config: ClusteringConfig,
    /// Objective value after each completed iteration.
    pub objective_trace: Vec<f64>,
    pub n_iter: usize,
    pub converged: bool,
}

fn check_labels(x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<()> {
    if y.nrows() != x.nrows() {
        return Err(Error::DimensionMismatch {
            expected: x.nrows(),
            actual: y.nrows(),
        });
    }
    if y.ncols() == 0 {
        return Err(Error::invalid("label matrix has no columns"));
    }
    Ok(())
}

/// Fits the clustering model with centers initialised by k-means.
pub fn fit(x: ArrayView2<f64>, y: ArrayView2<f64>, config: &ClusteringConfig) -> Result<ClusteringModel> {
    config.validate()?;
    if config.n_clusters > x.nrows() {
        return Err(Error::invalid(format!(
            "{} clusters requested for {} samples",
            config.n_clusters,
            x.nrows()
        )));
    }
    let init = kmeans_init(x, config.n_clusters, config.seed)?;
    fit_from(x, y, config, init)
}

/// Fits the clustering model from explicit initial centers.
///
/// Each iteration updates U, V, W and Z in that order and stops once the
/// Frobenius norm of the center change falls below `config.tol`.
pub fn fit_from(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    config: &ClusteringConfig,
    init_centers: Array2<f64>,
) -> Result<ClusteringModel> {
    config.validate()?;
    check_labels(x, y)?;
    let (n, d) = x.dim();
    let r = config.n_clusters;
    if init_centers.dim() != (r, d) {
        return Err(Error::invalid(format!(
            "initial centers have shape {:?}, expected ({r}, {d})",
            init_centers.dim()
        )));
    }
    if n == 0 {
        return Err(Error::invalid("no training samples"));
    }
    let c = y.ncols();
    let global_center = x.mean_axis(Axis(0)).expect("nonempty");
    let mut centers = init_centers;
    let mut weights = Array2::from_elem((r, d), 1.0 / d as f64);
    let mut cluster_labels = Array2::from_elem((r, c), 1.0 / c as f64);
    let mut memberships = Array2::zeros((n, r));
    let mut trace = Vec::new();
    let mut converged = false;
    let mut n_iter = 0;

    for iteration in 1..=config.max_iter {
        let diverged = |what: String| Error::Diverged { iteration, what };
        memberships = update_memberships(
            x,
            y,
            centers.view(),
            weights.view(),
            cluster_labels.view(),
            global_center.view(),
            config,
        )
        .map_err(|e| diverged(e.to_string()))?;
        let new_centers = update_centers(x, memberships.view(), global_center.view(), centers.view(), config);
        if new_centers.iter().any(|v| !v.is_finite()) {
            return Err(diverged("non-finite centers".into()));
        }
        weights = update_weights(x, memberships.view(), new_centers.view(), global_center.view(), config)
            .map_err(|e| diverged(e.to_string()))?;
        cluster_labels = update_cluster_labels(y, memberships.view(), config);

        let shift = (&new_centers - &centers).mapv(|v| v * v).sum().sqrt();
        centers = new_centers;
        let j = objective::objective_terms(
            x,
            y,
            memberships.view(),
            centers.view(),
            weights.view(),
            cluster_labels.view(),
            global_center.view(),
            config,
        )
        .total(config);
        if !j.is_finite() {
            return Err(diverged("non-finite objective".into()));
        }
        trace.push(j);
        n_iter = iteration;
        if shift < config.tol {
            converged = true;
            break;
        }
    }

    Ok(ClusteringModel {
        centers,
        weights,
        memberships,
        cluster_labels,
        global_center,
        config: config.clone(),
        objective_trace: trace,
        n_iter,
        converged,
    })
}

impl ClusteringModel {
    pub fn n_clusters(&self) -> usize {
        self.centers.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.centers.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.cluster_labels.ncols()
    }

    /// Objective terms of this model's state on `(x, y)`.
    pub fn objective_terms(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> ObjectiveTerms {
        objective::objective_terms(
            x,
            y,
            self.memberships.view(),
            self.centers.view(),
            self.weights.view(),
            self.cluster_labels.view(),
            self.global_center.view(),
            &self.config,
        )
    }

    /// Total objective of this model's state on `(x, y)`.
    pub fn objective(&self, x: ArrayView2<f64>, y: ArrayView2<f64>) -> f64 {
        self.objective_terms(x, y).total(&self.config)
    }

    /// Largest class probability of each cluster.
    pub fn cluster_purity(&self) -> Vec<f64> {
        self.cluster_labels
            .rows()
            .into_iter()
            .map(|r| r.fold(0.0f64, |a, &b| a.max(b)))
            .collect()
    }

    fn check_dim(&self, xt: ArrayView2<f64>) -> Result<()> {
        if xt.ncols() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: xt.ncols(),
            });
        }
        Ok(())
    }

    /// Test-time memberships from `||x - v_r||^2_w - eta ||v_r - v0||^2_w`,
    /// clipped below at [`DISTANCE_FLOOR`].
    pub fn predict_memberships(&self, xt: ArrayView2<f64>) -> Result<Array2<f64>> {
        self.check_dim(xt)?;
        let mut dis = updates::weighted_distances(xt, self.centers.view(), self.weights.view());
        if self.config.eta != 0.0 {
            let sep = updates::separations(self.centers.view(), self.weights.view(), self.global_center.view());
            dis -= &(sep * self.config.eta);
        }
        dis.mapv_inplace(|v| v.max(DISTANCE_FLOOR));
        let mut u = Array2::zeros(dis.dim());
        for (drow, mut urow) in dis.rows().into_iter().zip(u.rows_mut()) {
            updates::memberships_from_dissimilarities(
                drow,
                self.config.fuzzifier,
                urow.as_slice_mut().expect("row is contiguous"),
            );
        }
        Ok(u)
    }

    /// Class scores `U' Z`, each row normalised to sum to one.
    pub fn predict_proba(&self, xt: ArrayView2<f64>) -> Result<Array2<f64>> {
        if self.config.beta == 0.0 {
            log::warn!("predicting with an unsupervised clustering model (beta = 0)");
        }
        let mut scores = self.predict_memberships(xt)?.dot(&self.cluster_labels);
        for mut row in scores.rows_mut() {
            let s = row.sum();
            assert!(s > 0.0, "class scores vanished despite floored Z");
            row /= s;
        }
        Ok(scores)
    }

    /// Most probable class per row; ties go to the lowest class index.
    pub fn predict(&self, xt: ArrayView2<f64>) -> Result<Vec<usize>> {
        Ok(argmax_rows(self.predict_proba(xt)?.view()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Row-wise argmax with ties resolved toward the lowest index.
pub(crate) fn argmax_rows(scores: ArrayView2<f64>) -> Vec<usize> {
    scores
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (c, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = c;
                }
            }
            best
        })
        .collect()
}
