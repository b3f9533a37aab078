use ndarray::{ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::config::ClusteringConfig;
use super::updates::{label_losses, separations, weighted_distances};

/// The four terms of the clustering objective, unscaled by their
/// coefficients except where noted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTerms {
    /// `sum_{n,r} U^m ||x_n - v_r||^2_{w_r}`.
    pub compactness: f64,
    /// `sum_{r,d} W ln W` (nonpositive).
    pub weight_entropy: f64,
    /// `sum_r (sum_n U^m) ||v_r - v0||^2_{w_r}`.
    pub separation: f64,
    /// `sum_{n,r} U^m (-sum_c Y ln Z)`, with `Z` floored.
    pub label_loss: f64,
}

impl ObjectiveTerms {
    pub fn total(&self, config: &ClusteringConfig) -> f64 {
        let mut j = self.compactness + config.gamma * self.weight_entropy
            - config.eta * self.separation;
        if config.beta != 0.0 {
            j += config.beta * self.label_loss;
        }
        j
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn objective_terms(
    x: ArrayView2<f64>,
    y: ArrayView2<f64>,
    memberships: ArrayView2<f64>,
    centers: ArrayView2<f64>,
    weights: ArrayView2<f64>,
    cluster_labels: ArrayView2<f64>,
    global_center: ArrayView1<f64>,
    config: &ClusteringConfig,
) -> ObjectiveTerms {
    let um = memberships.mapv(|u| u.powf(config.fuzzifier));
    let compactness = (&um * &weighted_distances(x, centers, weights)).sum();
    let weight_entropy = weights
        .iter()
        .map(|&w| if w > 0.0 { w * w.ln() } else { 0.0 })
        .sum();
    let separation = um
        .sum_axis(Axis(0))
        .dot(&separations(centers, weights, global_center));
    let label_loss = if config.beta != 0.0 {
        (&um * &label_losses(y, cluster_labels)).sum()
    } else {
        0.0
    };
    ObjectiveTerms {
        compactness,
        weight_entropy,
        separation,
        label_loss,
    }
}
