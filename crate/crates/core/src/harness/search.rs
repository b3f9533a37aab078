use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::parallel::par_map;
use super::spec::{derive_seed, fuzzy_index, Algorithm, ExperimentSpec, Grids, Param, ParamPoint};
use crate::clustering::{fit_from, kmeans_init, ClusteringConfig};
use crate::dataset::{kfold_indices, Dataset};
use crate::metrics::bca;
use crate::tsk::{design_matrix, estimate_sigmas, log_firing_levels, normalized_firing, RidgeSystem};
use crate::Result;

/// Result of a cross-validated grid search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best: ParamPoint,
    /// Mean validation BCA of `best`.
    pub cv_bca: f64,
    /// Grid points searched in the final stage.
    pub n_points: usize,
    /// For two-stage searches, the clustering parameters chosen first.
    pub prior: Option<Box<SearchOutcome>>,
}

struct Fold {
    train: Dataset,
    val: Dataset,
    init: Array2<f64>,
    seed: u64,
}

/// Exhaustive grid search by k-fold cross validation on `train`, selecting
/// the highest mean validation BCA.
///
/// Only `train` is visible here; callers keep their test rows elsewhere.
/// Ties go to the earliest point with `h` outermost and `beta` innermost.
/// For `sessc_lse` the clustering parameters come from a preceding `sessc`
/// search and only `(h, lambda)` are searched. A fold whose fit fails scores
/// zero for that point.
pub fn grid_search_cv(
    train: &Dataset,
    spec: &ExperimentSpec,
    seed: u64,
    workers: usize,
) -> Result<SearchOutcome> {
    spec.validate()?;
    let fold_seed = derive_seed(seed, 0);
    let folds_idx = kfold_indices(train.n_samples(), spec.cv_folds, fold_seed)?;
    let folds: Vec<(Dataset, Dataset, u64)> = folds_idx
        .iter()
        .enumerate()
        .map(|(f, (tr, va))| (train.subset(tr), train.subset(va), derive_seed(fold_seed, f as u64)))
        .collect();
    let folds: Vec<Fold> = par_map(workers, folds, |(tr, va, s)| {
        let init = kmeans_init(tr.features.view(), spec.n_rules, s)?;
        Ok(Fold {
            train: tr,
            val: va,
            init,
            seed: s,
        })
    })
    .into_iter()
    .collect::<Result<_>>()?;

    if spec.algorithm == Algorithm::SesscLse {
        let prior = search_stage(&folds, spec, Algorithm::Sessc, &spec.grids, workers)?;
        let mut grids = spec.grids.clone();
        for p in [Param::Gamma, Param::Eta, Param::Beta] {
            *grids.values_mut(p) = vec![prior.best.get(p).expect("sessc tunes this")];
        }
        let mut outcome = search_stage(&folds, spec, Algorithm::SesscLse, &grids, workers)?;
        outcome.n_points = spec.grids.h.len() * spec.grids.lambda.len();
        outcome.prior = Some(Box::new(prior));
        Ok(outcome)
    } else {
        search_stage(&folds, spec, spec.algorithm, &spec.grids, workers)
    }
}

/// Values searched for `p`; a single `None` when the algorithm ignores it.
fn axis(grids: &Grids, algorithm: Algorithm, p: Param) -> Vec<Option<f64>> {
    if algorithm.uses(p) {
        grids.values(p).iter().copied().map(Some).collect()
    } else {
        vec![None]
    }
}

fn search_stage(
    folds: &[Fold],
    spec: &ExperimentSpec,
    algorithm: Algorithm,
    grids: &Grids,
    workers: usize,
) -> Result<SearchOutcome> {
    let hs = axis(grids, algorithm, Param::H);
    let lambdas = axis(grids, algorithm, Param::Lambda);
    let gammas = axis(grids, algorithm, Param::Gamma);
    let etas = axis(grids, algorithm, Param::Eta);
    let betas = axis(grids, algorithm, Param::Beta);

    // Clustering depends on (gamma, eta, beta) only; readouts on (h, lambda).
    let mut tuples = Vec::new();
    for &g in &gammas {
        for &e in &etas {
            for &b in &betas {
                tuples.push((g, e, b));
            }
        }
    }
    let units: Vec<(usize, usize)> = (0..tuples.len())
        .flat_map(|t| (0..folds.len()).map(move |f| (t, f)))
        .collect();
    let scores: Vec<Vec<f64>> = par_map(workers, units, |(t, f)| {
        let (gamma, eta, beta) = tuples[t];
        let point = ParamPoint {
            gamma,
            eta,
            beta,
            ..Default::default()
        };
        evaluate_fold(&folds[f], spec, algorithm, &point, &hs, &lambdas)
    });

    let n_folds = folds.len() as f64;
    let readouts = hs.len() * lambdas.len();
    let mean = |t: usize, k: usize| -> f64 {
        (0..folds.len())
            .map(|f| scores[t * folds.len() + f][k])
            .sum::<f64>()
            / n_folds
    };

    let mut best: Option<(ParamPoint, f64)> = None;
    for (ih, &h) in hs.iter().enumerate() {
        for (il, &lambda) in lambdas.iter().enumerate() {
            for (t, &(gamma, eta, beta)) in tuples.iter().enumerate() {
                let score = mean(t, ih * lambdas.len() + il);
                if best.as_ref().is_none_or(|(_, s)| score > *s) {
                    best = Some((
                        ParamPoint {
                            h,
                            lambda,
                            gamma,
                            eta,
                            beta,
                        },
                        score,
                    ));
                }
            }
        }
    }
    let (best, cv_bca) = best.expect("grids are nonempty");
    Ok(SearchOutcome {
        best,
        cv_bca,
        n_points: tuples.len() * readouts,
        prior: None,
    })
}

/// Validation BCA for every `(h, lambda)` readout of one clustering fit.
fn evaluate_fold(
    fold: &Fold,
    spec: &ExperimentSpec,
    algorithm: Algorithm,
    point: &ParamPoint,
    hs: &[Option<f64>],
    lambdas: &[Option<f64>],
) -> Vec<f64> {
    let n_readouts = hs.len() * lambdas.len();
    let m = fuzzy_index(fold.train.n_samples(), fold.train.n_features());
    let fitted = spec
        .clustering_config(algorithm, point, m, fold.seed)
        .and_then(|cfg: ClusteringConfig| {
            fit_from(
                fold.train.features.view(),
                fold.train.onehot.view(),
                &cfg,
                fold.init.clone(),
            )
        });
    let model = match fitted {
        Ok(m) => m,
        Err(e) => {
            log::warn!("{algorithm} {point:?}: fit failed ({e}); scoring 0");
            return vec![0.0; n_readouts];
        }
    };
    let score = |pred: Result<Vec<usize>>| -> f64 {
        pred.and_then(|p| bca(&fold.val.labels, &p, fold.val.n_classes))
            .unwrap_or_else(|e| {
                log::warn!("{algorithm} {point:?}: evaluation failed ({e}); scoring 0");
                0.0
            })
    };
    if !algorithm.is_tsk() {
        return vec![score(model.predict(fold.val.features.view())); n_readouts];
    }

    let xt = fold.train.features.view();
    let xv = fold.val.features.view();
    let mut out = Vec::with_capacity(n_readouts);
    for h in hs {
        let h = h.expect("tsk algorithms tune h");
        let designs = (|| -> Result<(Array2<f64>, Array2<f64>)> {
            let sig = estimate_sigmas(xt, model.memberships.view(), model.centers.view(), h)?;
            let build = |x| -> Result<Array2<f64>> {
                let lf = log_firing_levels(x, model.centers.view(), sig.view(), spec.spread_form)?;
                design_matrix(normalized_firing(lf.view()).view(), x, spec.order)
            };
            Ok((build(xt)?, build(xv)?))
        })();
        let system = designs.and_then(|(dt, dv)| Ok((RidgeSystem::new(dt.view(), fold.train.onehot.view())?, dv)));
        match system {
            Ok((system, dv)) => {
                for lambda in lambdas {
                    let lambda = lambda.expect("tsk algorithms tune lambda");
                    let pred = system
                        .solve(lambda)
                        .map(|b| crate::clustering::argmax_rows(dv.dot(&b).view()));
                    out.push(score(pred));
                }
            }
            Err(e) => {
                log::warn!("{algorithm} h={h}: readout failed ({e}); scoring 0");
                out.extend(std::iter::repeat_n(0.0, lambdas.len()));
            }
        }
    }
    out
}
