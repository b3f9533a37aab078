use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::model::{train_model, Classifier, Pipeline, TrainedModel};
use super::parallel::{par_map, with_pool, workers_from_env};
use super::search::{grid_search_cv, SearchOutcome};
use super::spec::{derive_seed, ExperimentSpec, Param, ParamPoint};
use crate::dataset::{fit_zscore, random_split_indices, Dataset, DatasetManifest};
use crate::metrics::MetricsReport;
use crate::{Error, Result};

/// How every random stream is derived from the master seed.
pub const SEED_RULE: &str = "split_seed(i) = derive_seed(master_seed, i); \
partition = derive_seed(split_seed, 0); cv = derive_seed(split_seed, 1) \
(folds = derive_seed(cv, 0), fold f clustering = derive_seed(folds, f)); \
final fit = derive_seed(split_seed, 2); derive_seed(p, s) = splitmix64(p + (s + 1) * 0x9E3779B97F4A7C15)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecord {
    pub index: usize,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    /// Hyperparameters used for the final fit.
    pub params: Option<ParamPoint>,
    /// Mean validation BCA of `params` (absent for fixed-parameter runs).
    pub cv_bca: Option<f64>,
    /// Clustering parameters from the preceding `sessc` search, if any.
    pub prior_params: Option<ParamPoint>,
    pub n_iter: Option<usize>,
    pub converged: Option<bool>,
    pub metrics: Option<MetricsReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub library_version: String,
    pub seed_rule: String,
    pub spec: ExperimentSpec,
    pub dataset: DatasetManifest,
    pub splits: Vec<SplitRecord>,
    pub n_failed: usize,
    pub mean_rca: f64,
    pub std_rca: f64,
    pub mean_bca: f64,
    pub std_bca: f64,
    pub wall_clock_secs: f64,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

impl RunManifest {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with the wall-clock field zeroed, for reproducibility checks.
    pub fn to_json_without_timing(&self) -> Result<String> {
        let mut m = self.clone();
        m.wall_clock_secs = 0.0;
        m.to_json()
    }

    /// Successful per-split RCA values.
    pub fn rcas(&self) -> Vec<f64> {
        self.splits.iter().filter_map(|s| s.metrics.as_ref().map(|m| m.rca)).collect()
    }

    /// Successful per-split BCA values.
    pub fn bcas(&self) -> Vec<f64> {
        self.splits.iter().filter_map(|s| s.metrics.as_ref().map(|m| m.bca)).collect()
    }

    /// Per-split metrics as CSV, one row per split.
    pub fn split_table_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            "split", "seed", "n_train", "n_test", "rca", "bca", "cv_bca", "h", "lambda", "gamma", "eta",
            "beta", "error",
        ])
        .map_err(csv_err)?;
        for s in &self.splits {
            let p = s.params.unwrap_or_default();
            w.write_record([
                s.index.to_string(),
                s.seed.to_string(),
                s.n_train.to_string(),
                s.n_test.to_string(),
                fmt_opt(s.metrics.as_ref().map(|m| m.rca)),
                fmt_opt(s.metrics.as_ref().map(|m| m.bca)),
                fmt_opt(s.cv_bca),
                fmt_opt(p.h),
                fmt_opt(p.lambda),
                fmt_opt(p.gamma),
                fmt_opt(p.eta),
                fmt_opt(p.beta),
                s.error.clone().unwrap_or_default(),
            ])
            .map_err(csv_err)?;
        }
        into_string(w)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Table(e.to_string())
}

pub(crate) fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Table(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Runs the benchmark protocol with the worker count from the environment.
pub fn run_benchmark(spec: &ExperimentSpec) -> Result<RunManifest> {
    run_benchmark_with_workers(spec, workers_from_env())
}

/// For each split: 70/30 partition, z-score on the training side, grid
/// search by CV on the training side (unless parameters are fixed), refit,
/// and score on the test side.
///
/// Failed splits are excluded from the aggregates as long as fewer than 10%
/// fail; otherwise the run aborts.
pub fn run_benchmark_with_workers(spec: &ExperimentSpec, workers: usize) -> Result<RunManifest> {
    spec.validate()?;
    let start = Instant::now();
    let data = spec.dataset.load()?;
    let splits: Vec<usize> = (0..spec.n_splits).collect();
    let records = with_pool(workers, || {
        par_map(workers, splits, |i| run_split(&data, spec, i, workers))
    });

    let n_failed = records.iter().filter(|r| r.metrics.is_none()).count();
    if n_failed as f64 >= 0.1 * spec.n_splits as f64 && n_failed > 0 {
        let last = records
            .iter()
            .rev()
            .find_map(|r| r.error.clone())
            .unwrap_or_default();
        return Err(Error::TooManyFailures {
            failed: n_failed,
            total: spec.n_splits,
            last,
        });
    }
    let rca: Vec<f64> = records.iter().filter_map(|r| r.metrics.as_ref().map(|m| m.rca)).collect();
    let bca: Vec<f64> = records.iter().filter_map(|r| r.metrics.as_ref().map(|m| m.bca)).collect();
    let (mean_rca, std_rca) = mean_std(&rca);
    let (mean_bca, std_bca) = mean_std(&bca);
    Ok(RunManifest {
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        seed_rule: SEED_RULE.to_string(),
        spec: spec.clone(),
        dataset: data.manifest(None),
        splits: records,
        n_failed,
        mean_rca,
        std_rca,
        mean_bca,
        std_bca,
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

fn run_split(data: &Dataset, spec: &ExperimentSpec, index: usize, workers: usize) -> SplitRecord {
    let seed = derive_seed(spec.master_seed, index as u64);
    let mut record = SplitRecord {
        index,
        seed,
        n_train: 0,
        n_test: 0,
        params: None,
        cv_bca: None,
        prior_params: None,
        n_iter: None,
        converged: None,
        metrics: None,
        error: None,
    };
    if let Err(e) = evaluate_split(data, spec, seed, workers, &mut record) {
        log::warn!("split {index} failed: {e}");
        record.error = Some(e.to_string());
    }
    record
}

fn evaluate_split(
    data: &Dataset,
    spec: &ExperimentSpec,
    seed: u64,
    workers: usize,
    record: &mut SplitRecord,
) -> Result<()> {
    let (train_idx, test_idx) =
        random_split_indices(data.n_samples(), spec.train_fraction, derive_seed(seed, 0))?;
    record.n_train = train_idx.len();
    record.n_test = test_idx.len();
    let train_raw = data.subset(&train_idx);
    if train_raw.class_counts().iter().any(|&c| c == 0) {
        log::warn!("split {}: a class is absent from the training side", record.index);
    }
    let normalizer = fit_zscore(&train_raw);
    let train = normalizer.apply(&train_raw)?;
    let test = normalizer.apply(&data.subset(&test_idx))?;

    let params = match spec.fixed {
        Some(point) => point.restricted_to(spec.algorithm)?,
        None => {
            let outcome: SearchOutcome = grid_search_cv(&train, spec, derive_seed(seed, 1), workers)?;
            record.cv_bca = Some(outcome.cv_bca);
            record.prior_params = outcome.prior.as_ref().map(|p| p.best);
            outcome.best
        }
    };
    record.params = Some(params);
    let model = train_model(&train, spec, spec.algorithm, &params, derive_seed(seed, 2))?;
    record.n_iter = Some(model.clustering().n_iter);
    record.converged = Some(model.clustering().converged);
    let pred = model.predict(test.features.view())?;
    record.metrics = Some(MetricsReport::new(&test.labels, &pred, data.n_classes)?);
    Ok(())
}

/// Normalises all of `data` and fits `spec.algorithm` with fixed `point`.
pub fn fit_pipeline(data: &Dataset, spec: &ExperimentSpec, point: &ParamPoint, seed: u64) -> Result<Pipeline> {
    let normalizer = fit_zscore(data);
    let train = normalizer.apply(data)?;
    let point = point.restricted_to(spec.algorithm)?;
    let model: TrainedModel = train_model(&train, spec, spec.algorithm, &point, seed)?;
    Ok(Pipeline { normalizer, model })
}

/// Quantity varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Number of rules (clusters).
    R,
    Value(Param),
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "r" | "rules" | "n_rules" => SweepParam::R,
            "h" => SweepParam::Value(Param::H),
            "lambda" => SweepParam::Value(Param::Lambda),
            "gamma" => SweepParam::Value(Param::Gamma),
            "eta" => SweepParam::Value(Param::Eta),
            "beta" => SweepParam::Value(Param::Beta),
            other => return Err(Error::invalid(format!("unknown sweep parameter `{other}`"))),
        })
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepParam::R => f.write_str("R"),
            SweepParam::Value(p) => write!(f, "{}", format!("{p:?}").to_ascii_lowercase()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub mean_rca: f64,
    pub std_rca: f64,
    pub mean_bca: f64,
    pub std_bca: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    pub manifests: Vec<RunManifest>,
}

impl SweepResult {
    pub fn table_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            self.param.to_string().as_str(),
            "mean_rca",
            "std_rca",
            "mean_bca",
            "std_bca",
        ])
        .map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                r.value.to_string(),
                r.mean_rca.to_string(),
                r.std_rca.to_string(),
                r.mean_bca.to_string(),
                r.std_bca.to_string(),
            ])
            .map_err(csv_err)?;
        }
        into_string(w)
    }
}

/// One benchmark per value of `param`, every other parameter held at
/// `spec.fixed` (or [`ParamPoint::sweep_defaults`]) with no grid search.
pub fn sweep(spec: &ExperimentSpec, param: SweepParam, values: &[f64], workers: usize) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::invalid("sweep needs at least one value"));
    }
    if let SweepParam::Value(p) = param {
        if !spec.algorithm.uses(p) {
            return Err(Error::invalid(format!("{} does not use {param}", spec.algorithm)));
        }
    }
    let base = spec.fixed.unwrap_or_else(ParamPoint::sweep_defaults);
    let mut rows = Vec::with_capacity(values.len());
    let mut manifests = Vec::with_capacity(values.len());
    for &value in values {
        let mut s = spec.clone();
        let mut point = base;
        match param {
            SweepParam::R => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::invalid(format!("rule count {value} is not a positive integer")));
                }
                s.n_rules = value as usize;
            }
            SweepParam::Value(p) => point.set(p, Some(value)),
        }
        s.fixed = Some(point);
        let m = run_benchmark_with_workers(&s, workers)?;
        rows.push(SweepRow {
            value,
            mean_rca: m.mean_rca,
            std_rca: m.std_rca,
            mean_bca: m.mean_bca,
            std_bca: m.std_bca,
        });
        manifests.push(m);
    }
    Ok(SweepResult {
        param,
        rows,
        manifests,
    })
}
