//! Dataset container, ingestion, normalisation, splitting and synthetic data.

mod normalize;
mod split;
mod synthetic;
mod table;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use normalize::{fit_zscore, Normalizer, STD_FLOOR};
pub use split::{kfold_indices, random_split, random_split_indices};
pub use synthetic::{generate_synthetic, SyntheticKind, CIRCLE_RADII, SPIRAL_REVOLUTIONS};
pub use table::{load_table, table_csv, LabelColumn};

/// A labelled feature matrix with its one-hot label encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub onehot: Array2<f64>,
    pub n_classes: usize,
    pub feature_names: Vec<String>,
    /// Raw label value for each integer class.
    pub class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, deriving the one-hot matrix from `labels`.
    ///
    /// Feature and class names default to `x0..` and `0..` when empty.
    pub fn new(
        features: Array2<f64>,
        labels: Vec<usize>,
        n_classes: usize,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let (n, d) = features.dim();
        if n == 0 || d == 0 {
            return Err(Error::invalid("dataset needs at least one row and one column"));
        }
        if n_classes < 2 {
            return Err(Error::invalid("dataset needs at least two classes"));
        }
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::invalid(format!(
                "label {bad} out of range for {n_classes} classes"
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("features contain non-finite values"));
        }
        let feature_names = if feature_names.is_empty() {
            (0..d).map(|j| format!("x{j}")).collect()
        } else if feature_names.len() == d {
            feature_names
        } else {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: feature_names.len(),
            });
        };
        let class_names = if class_names.is_empty() {
            (0..n_classes).map(|c| c.to_string()).collect()
        } else if class_names.len() == n_classes {
            class_names
        } else {
            return Err(Error::DimensionMismatch {
                expected: n_classes,
                actual: class_names.len(),
            });
        };
        let onehot = onehot(&labels, n_classes);
        Ok(Self {
            features,
            labels,
            onehot,
            n_classes,
            feature_names,
            class_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    /// Rows selected by `idx`, in that order. Class count and names are kept
    /// even when some classes do not occur in the subset.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select(Axis(0), idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            onehot: self.onehot.select(Axis(0), idx),
            n_classes: self.n_classes,
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Same labels and metadata with a replacement feature matrix.
    pub fn with_features(&self, features: Array2<f64>) -> Result<Dataset> {
        if features.dim() != self.features.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                actual: features.ncols(),
            });
        }
        Ok(Dataset {
            features,
            ..self.clone()
        })
    }

    /// Number of samples per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Sidecar summary of shape, label mapping and (optionally) normalisation.
    pub fn manifest(&self, normalizer: Option<&Normalizer>) -> DatasetManifest {
        DatasetManifest {
            n_samples: self.n_samples(),
            n_features: self.n_features(),
            n_classes: self.n_classes,
            class_names: self.class_names.clone(),
            class_counts: self.class_counts(),
            feature_names: self.feature_names.clone(),
            normalizer: normalizer.cloned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_classes: usize,
    /// `class_names[c]` is the raw label mapped to integer class `c`.
    pub class_names: Vec<String>,
    pub class_counts: Vec<usize>,
    pub feature_names: Vec<String>,
    pub normalizer: Option<Normalizer>,
}

pub(crate) fn onehot(labels: &[usize], n_classes: usize) -> Array2<f64> {
    let mut y = Array2::zeros((labels.len(), n_classes));
    for (n, &l) in labels.iter().enumerate() {
        y[[n, l]] = 1.0;
    }
    y
}
