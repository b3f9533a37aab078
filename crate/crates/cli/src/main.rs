//! `sessc`: run benchmarks, parameter sweeps and decision-boundary exports.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use sessc_core::clustering::ZNormalization;
use sessc_core::dataset::{generate_synthetic, table_csv, LabelColumn, SyntheticKind};
use sessc_core::harness::{
    export_decision_grid, fit_pipeline, grid_csv, run_benchmark_with_workers, sweep,
    workers_from_env, Algorithm, Bounds, DatasetSource, ExperimentSpec, Param, ParamPoint,
    SweepParam,
};
use sessc_core::tsk::{Order, SpreadForm};

#[derive(Parser)]
#[command(name = "sessc", version, about = "SESSC and TSK fuzzy classifier benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repeated-split benchmark with cross-validated grid search.
    Bench {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Write the run manifest (JSON) here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the per-split metrics table (CSV) here.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// One fixed-parameter benchmark per value of a single parameter.
    Sweep {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Parameter to vary: R, h, lambda, gamma, eta or beta.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated values of the parameter.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Write the summary table (CSV) here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory receiving one manifest per value.
        #[arg(long)]
        manifest_dir: Option<PathBuf>,
    },
    /// Predicted class over a lattice covering a 2-feature dataset.
    Boundary {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Points per axis.
        #[arg(long, default_value_t = 200)]
        resolution: usize,
        /// Padding around the data, as a fraction of its extent.
        #[arg(long, default_value_t = 0.05)]
        pad: f64,
        /// Write the grid (CSV) here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic dataset as CSV.
    Synth {
        #[arg(long)]
        kind: SyntheticKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Every field of an experiment; flags override values from `--config`.
#[derive(Args)]
struct ExperimentArgs {
    /// TOML file holding an experiment description.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Delimited table with a header row.
    #[arg(long, conflicts_with = "synthetic")]
    data: Option<PathBuf>,
    /// Label column, by name or zero-based index.
    #[arg(long, requires = "data")]
    label_column: Option<LabelColumn>,
    /// Comma-separated names of categorical feature columns.
    #[arg(long, value_delimiter = ',', requires = "data")]
    categorical: Option<Vec<String>>,
    /// Use a generated dataset instead of a table.
    #[arg(long)]
    synthetic: Option<SyntheticKind>,
    #[arg(long, requires = "synthetic")]
    n: Option<usize>,
    #[arg(long, requires = "synthetic")]
    noise: Option<f64>,
    #[arg(long, requires = "synthetic")]
    data_seed: Option<u64>,

    /// fcm_lse, ewfcm_lse, essc_lse, sessc or sessc_lse.
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Consequent order: zero or first.
    #[arg(long)]
    order: Option<Order>,
    /// Number of rules (clusters).
    #[arg(long)]
    rules: Option<usize>,
    #[arg(long)]
    splits: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    cv_folds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// row or paper_column.
    #[arg(long, value_parser = parse_snake::<ZNormalization>)]
    z_normalization: Option<ZNormalization>,
    /// literal or squared.
    #[arg(long, value_parser = parse_snake::<SpreadForm>)]
    spread_form: Option<SpreadForm>,

    /// Comma-separated search grid for h.
    #[arg(long, value_delimiter = ',')]
    h_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    lambda_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    gamma_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    eta_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    beta_grid: Option<Vec<f64>>,

    /// Fix h (skips grid search; unset parameters take sweep defaults).
    #[arg(long)]
    h: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,

    /// Worker threads; defaults to the SESSC_WORKERS environment variable.
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_snake<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    toml::Value::String(s.to_string())
        .try_into()
        .map_err(|e| format!("{e}"))
}

impl ExperimentArgs {
    fn workers(&self) -> usize {
        self.workers.unwrap_or_else(workers_from_env).max(1)
    }

    fn dataset(&self, base: Option<&DatasetSource>) -> Result<Option<DatasetSource>> {
        if let Some(path) = &self.data {
            let (label_column, categorical) = match base {
                Some(DatasetSource::Table {
                    label_column,
                    categorical,
                    ..
                }) => (label_column.clone(), categorical.clone()),
                _ => (LabelColumn::default(), Vec::new()),
            };
            return Ok(Some(DatasetSource::Table {
                path: path.clone(),
                label_column: self.label_column.clone().unwrap_or(label_column),
                categorical: self.categorical.clone().unwrap_or(categorical),
            }));
        }
        if let Some(kind) = self.synthetic {
            let Some(n) = self.n else {
                bail!("--synthetic needs --n");
            };
            return Ok(Some(DatasetSource::Synthetic {
                kind,
                n,
                noise: self.noise.unwrap_or(0.0),
                seed: self.data_seed.unwrap_or(0),
            }));
        }
        Ok(None)
    }

    fn spec(&self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let mut spec: ExperimentSpec =
                    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                if let Some(d) = self.dataset(Some(&spec.dataset))? {
                    spec.dataset = d;
                }
                if let Some(a) = self.algorithm {
                    spec.algorithm = a;
                }
                spec
            }
            None => {
                let Some(dataset) = self.dataset(None)? else {
                    bail!("give --data, --synthetic or --config");
                };
                let Some(algorithm) = self.algorithm else {
                    bail!("give --algorithm or --config");
                };
                ExperimentSpec::new(dataset, algorithm)
            }
        };
        macro_rules! set {
            ($flag:expr => $field:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v;
                }
            };
        }
        set!(self.order => spec.order);
        set!(self.rules => spec.n_rules);
        set!(self.splits => spec.n_splits);
        set!(self.train_fraction => spec.train_fraction);
        set!(self.cv_folds => spec.cv_folds);
        set!(self.seed => spec.master_seed);
        set!(self.max_iter => spec.max_iter);
        set!(self.tol => spec.tol);
        set!(self.z_normalization => spec.z_normalization);
        set!(self.spread_form => spec.spread_form);
        set!(self.h_grid => spec.grids.h);
        set!(self.lambda_grid => spec.grids.lambda);
        set!(self.gamma_grid => spec.grids.gamma);
        set!(self.eta_grid => spec.grids.eta);
        set!(self.beta_grid => spec.grids.beta);

        let fixed = [
            (Param::H, self.h),
            (Param::Lambda, self.lambda),
            (Param::Gamma, self.gamma),
            (Param::Eta, self.eta),
            (Param::Beta, self.beta),
        ];
        if fixed.iter().any(|(_, v)| v.is_some()) {
            let mut point = spec.fixed.unwrap_or_else(ParamPoint::sweep_defaults);
            for (p, v) in fixed {
                if v.is_some() {
                    point.set(p, v);
                }
            }
            spec.fixed = Some(point);
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bench {
            experiment,
            out,
            table,
        } => {
            let spec = experiment.spec()?;
            let manifest = run_benchmark_with_workers(&spec, experiment.workers())?;
            log::info!(
                "{}: RCA {:.4} ± {:.4}, BCA {:.4} ± {:.4} over {} splits ({} failed)",
                spec.algorithm,
                manifest.mean_rca,
                manifest.std_rca,
                manifest.mean_bca,
                manifest.std_bca,
                manifest.splits.len(),
                manifest.n_failed
            );
            emit(out.as_deref(), &(manifest.to_json()? + "\n"))?;
            if let Some(t) = table {
                emit(Some(&t), &manifest.split_table_csv()?)?;
            }
        }
        Command::Sweep {
            experiment,
            param,
            values,
            out,
            manifest_dir,
        } => {
            let spec = experiment.spec()?;
            let result = sweep(&spec, param, &values, experiment.workers())?;
            if let Some(dir) = manifest_dir {
                fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                for (row, manifest) in result.rows.iter().zip(&result.manifests) {
                    let path = dir.join(format!("{param}_{}.json", row.value));
                    emit(Some(&path), &(manifest.to_json()? + "\n"))?;
                }
            }
            emit(out.as_deref(), &result.table_csv()?)?;
        }
        Command::Boundary {
            experiment,
            resolution,
            pad,
            out,
        } => {
            let spec = experiment.spec()?;
            let data = spec.dataset.load()?;
            if data.n_features() != 2 {
                bail!("decision grids need a 2-feature dataset, got {}", data.n_features());
            }
            let point = spec.fixed.unwrap_or_else(ParamPoint::sweep_defaults);
            let pipeline = fit_pipeline(&data, &spec, &point, spec.master_seed)?;
            let bounds = Bounds::around(&data.features, pad)?;
            let cells = export_decision_grid(&pipeline, bounds, resolution)?;
            emit(out.as_deref(), &grid_csv(&cells)?)?;
        }
        Command::Synth {
            kind,
            n,
            noise,
            seed,
            out,
        } => {
            let data = generate_synthetic(kind, n, noise, seed)?;
            emit(out.as_deref(), &table_csv(&data)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
