//! Raw and balanced classification accuracy.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn check(y_true: &[usize], y_pred: &[usize]) -> Result<()> {
    if y_true.is_empty() {
        return Err(Error::invalid("cannot score an empty prediction set"));
    }
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            actual: y_pred.len(),
        });
    }
    Ok(())
}

/// Fraction of exact matches.
pub fn rca(y_true: &[usize], y_pred: &[usize]) -> Result<f64> {
    check(y_true, y_pred)?;
    let hits = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / y_true.len() as f64)
}

/// Unweighted mean of per-class recall. Classes absent from `y_true` are
/// left out of the mean.
pub fn bca(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<f64> {
    Ok(MetricsReport::new(y_true, y_pred, n_classes)?.bca)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rca: f64,
    pub bca: f64,
    /// Recall per class; `None` for classes absent from the ground truth.
    pub per_class_rca: Vec<Option<f64>>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
}

impl MetricsReport {
    pub fn new(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<Self> {
        check(y_true, y_pred)?;
        let mut confusion = vec![vec![0usize; n_classes]; n_classes];
        for (&t, &p) in y_true.iter().zip(y_pred) {
            if t >= n_classes || p >= n_classes {
                return Err(Error::invalid(format!(
                    "label {} out of range for {n_classes} classes",
                    t.max(p)
                )));
            }
            confusion[t][p] += 1;
        }
        let per_class_rca: Vec<Option<f64>> = confusion
            .iter()
            .enumerate()
            .map(|(c, row)| {
                let total: usize = row.iter().sum();
                (total > 0).then(|| row[c] as f64 / total as f64)
            })
            .collect();
        let present: Vec<f64> = per_class_rca.iter().flatten().copied().collect();
        if present.len() < n_classes {
            log::warn!(
                "{} of {n_classes} classes absent from ground truth; excluded from BCA",
                n_classes - present.len()
            );
        }
        let bca = present.iter().sum::<f64>() / present.len() as f64;
        Ok(Self {
            rca: rca(y_true, y_pred)?,
            bca,
            per_class_rca,
            confusion,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rca_cases() {
        assert_eq!(rca(&[0, 1, 2], &[0, 1, 2]).unwrap(), 1.0);
        assert_eq!(rca(&[0, 0, 0, 1], &[0, 0, 0, 0]).unwrap(), 0.75);
        assert_eq!(rca(&[0, 0], &[1, 1]).unwrap(), 0.0);
        assert!(rca(&[], &[]).is_err());
    }

    #[test]
    fn bca_cases() {
        let mut truth = vec![0; 90];
        truth.extend(vec![1; 10]);
        assert_eq!(bca(&truth, &[0; 100], 2).unwrap(), 0.5);
        assert_eq!(bca(&[0, 1, 1], &[0, 1, 1], 2).unwrap(), 1.0);
        // recalls {1.0, 0.5, 0.0}
        assert_eq!(bca(&[0, 1, 1, 2], &[0, 1, 0, 0], 3).unwrap(), 0.5);
        assert!(bca(&[], &[], 2).is_err());
    }

    #[test]
    fn absent_class_is_excluded() {
        let r = MetricsReport::new(&[0, 0, 1], &[0, 1, 1], 3).unwrap();
        assert_eq!(r.per_class_rca, vec![Some(0.5), Some(1.0), None]);
        assert_eq!(r.bca, 0.75);
        assert_eq!(r.confusion.iter().flatten().sum::<usize>(), 3);
    }

    proptest! {
        #[test]
        fn invariants(pairs in prop::collection::vec((0usize..3, 0usize..3), 1..60), dup in 0usize..3) {
            let (t, p): (Vec<_>, Vec<_>) = pairs.iter().copied().unzip();
            let report = MetricsReport::new(&t, &p, 3).unwrap();
            let present: Vec<f64> = report.per_class_rca.iter().flatten().copied().collect();
            prop_assert_eq!(report.bca, present.iter().sum::<f64>() / present.len() as f64);

            let mut rev_t = t.clone();
            let mut rev_p = p.clone();
            rev_t.reverse();
            rev_p.reverse();
            prop_assert_eq!(rca(&rev_t, &rev_p).unwrap(), report.rca);

            // Duplicating every sample of one class leaves BCA unchanged.
            let (mut t2, mut p2) = (t.clone(), p.clone());
            for (&a, &b) in t.iter().zip(&p) {
                if a == dup {
                    t2.push(a);
                    p2.push(b);
                }
            }
            prop_assert!((bca(&t2, &p2, 3).unwrap() - report.bca).abs() < 1e-12);
        }

        #[test]
        fn balanced_rca_equals_bca(preds in prop::collection::vec(0usize..2, 20)) {
            let truth: Vec<usize> = (0..20).map(|i| i % 2).collect();
            let report = MetricsReport::new(&truth, &preds, 2).unwrap();
            prop_assert!((report.rca - report.bca).abs() < 1e-12);
        }
    }
}
