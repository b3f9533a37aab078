//! Experiment orchestration: cross-validated grid search, multi-split
//! benchmarks, parameter sweeps and decision-grid export.

mod bench;
mod boundary;
mod model;
mod parallel;
mod search;
mod spec;

pub use bench::{
    fit_pipeline, run_benchmark, run_benchmark_with_workers, sweep, RunManifest, SplitRecord,
    SweepParam, SweepResult, SweepRow, SEED_RULE,
};
pub use boundary::{export_decision_grid, grid_csv, Bounds, GridCell};
pub use model::{train_model, Classifier, Pipeline, TrainedModel};
pub use parallel::{workers_from_env, WORKERS_ENV};
pub use search::{grid_search_cv, SearchOutcome};
pub use spec::{
    derive_seed, fuzzy_index, Algorithm, DatasetSource, ExperimentSpec, Grids, Param, ParamPoint,
};
