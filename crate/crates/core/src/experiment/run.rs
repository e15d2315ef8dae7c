//! Sweep execution and result emission.
//!
//! One sweep walks the awareness scales in the configuration and, per
//! point, runs the splitting estimator over independent trials plus an
//! optional plain Monte Carlo baseline. Rows are streamed to a callback as
//! they finish so long runs can flush partial results, and the CSV output
//! deliberately excludes timing so identical configurations yield
//! identical bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::scenario::{LaneChangeModel, ScenarioError};
use crate::shs::{transform_gshs_to_shs, ShsError};
use crate::splitting::{estimate_reach_probability, monte_carlo_estimate, EstimatorError};
use crate::stats::{binomial_se, pairwise_sum, sample_std};
use crate::stream::StreamKey;

use super::config::{ConfigError, ExperimentConfig};

/// Stream domain for splitting trials under the master seed.
const DOMAIN_SPLITTING: u64 = 1;
/// Stream domain for the plain Monte Carlo baseline.
const DOMAIN_MC: u64 = 2;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Shs(#[from] ShsError),
    #[error("cannot write results: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot write results: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot write results: {0}")]
    Json(#[from] serde_json::Error),
}

/// Which estimator produced a row.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Splitting,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Splitting => "splitting",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

/// Aggregated estimate for one (sweep point, method) pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResultRow {
    pub awareness_ratio: f64,
    pub method: Method,
    /// Mean over trials, `pairwise_sum(trial_values) / trials` exactly.
    pub mean_probability: f64,
    /// Standard error of the mean across trials; binomial for the
    /// single-trial Monte Carlo baseline.
    pub std_error: f64,
    pub trials: usize,
    pub samples_per_trial: usize,
    pub trial_values: Vec<f64>,
    /// Mean conditional surviving fraction per level; empty for Monte
    /// Carlo rows.
    pub level_means: Vec<f64>,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

/// Runs the full sweep, invoking `on_row` after each finished row.
pub fn run_sweep_with(
    config: &ExperimentConfig,
    mut on_row: impl FnMut(&ResultRow),
) -> Result<ResultTable, RunError> {
    config.validate()?;
    let root = StreamKey::root(config.master_seed);
    let mut rows = Vec::new();
    for (sweep_idx, &mu) in config.awareness_sweep.iter().enumerate() {
        let model = LaneChangeModel::new(config.to_scenario_params(mu))?;
        let schedule = model.level_schedule();
        let shs = transform_gshs_to_shs(model)?;

        let start = Instant::now();
        let mut trial_values = Vec::with_capacity(config.trials);
        let mut level_sums = vec![0.0f64; schedule.len()];
        for trial in 0..config.trials {
            let key = root
                .child(DOMAIN_SPLITTING)
                .child(sweep_idx as u64)
                .child(trial as u64);
            let estimate = estimate_reach_probability(
                &shs,
                &schedule,
                config.particles,
                config.time_step,
                key,
            )?;
            trial_values.push(estimate.reach_probability);
            for (sum, fraction) in level_sums.iter_mut().zip(&estimate.level_fractions) {
                *sum += *fraction;
            }
        }
        let n = config.trials as f64;
        let mean = pairwise_sum(&trial_values) / n;
        let std_error = if config.trials > 1 {
            sample_std(&trial_values) / n.sqrt()
        } else {
            0.0
        };
        let row = ResultRow {
            awareness_ratio: mu,
            method: Method::Splitting,
            mean_probability: mean,
            std_error,
            trials: config.trials,
            samples_per_trial: config.particles,
            trial_values,
            level_means: level_sums.iter().map(|s| s / n).collect(),
            wall_seconds: start.elapsed().as_secs_f64(),
        };
        on_row(&row);
        rows.push(row);

        if config.mc_runs > 0 {
            let start = Instant::now();
            let key = root.child(DOMAIN_MC).child(sweep_idx as u64);
            let target = schedule.level(schedule.len() - 1);
            let mc = monte_carlo_estimate(
                &shs,
                target,
                schedule.horizon(),
                config.mc_runs,
                config.time_step,
                key,
            )?;
            let row = ResultRow {
                awareness_ratio: mu,
                method: Method::MonteCarlo,
                mean_probability: mc.probability,
                std_error: binomial_se(mc.probability, mc.runs),
                trials: 1,
                samples_per_trial: mc.runs,
                trial_values: vec![mc.probability],
                level_means: Vec::new(),
                wall_seconds: start.elapsed().as_secs_f64(),
            };
            on_row(&row);
            rows.push(row);
        }
    }
    Ok(ResultTable { rows })
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<ResultTable, RunError> {
    run_sweep_with(config, |_| {})
}

/// Runs only the Monte Carlo baseline at one awareness scale, on the
/// stream that scale would get as the sole point of a sweep.
pub fn run_mc_point(config: &ExperimentConfig, awareness_ratio: f64) -> Result<ResultRow, RunError> {
    let mut single = config.clone();
    single.awareness_sweep = vec![awareness_ratio];
    single.validate()?;
    let model = LaneChangeModel::new(single.to_scenario_params(awareness_ratio))?;
    let schedule = model.level_schedule();
    let shs = transform_gshs_to_shs(model)?;
    let start = Instant::now();
    let key = StreamKey::root(single.master_seed).child(DOMAIN_MC).child(0);
    let target = schedule.level(schedule.len() - 1);
    let mc = monte_carlo_estimate(
        &shs,
        target,
        schedule.horizon(),
        single.mc_runs,
        single.time_step,
        key,
    )?;
    Ok(ResultRow {
        awareness_ratio,
        method: Method::MonteCarlo,
        mean_probability: mc.probability,
        std_error: binomial_se(mc.probability, mc.runs),
        trials: 1,
        samples_per_trial: mc.runs,
        trial_values: vec![mc.probability],
        level_means: Vec::new(),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OutputFormat {
    Csv,
    Json,
    All,
}

/// Full record written alongside the tables: enough to rerun the sweep.
#[derive(Serialize)]
struct ResultsDocument<'a> {
    version: &'static str,
    master_seed: u64,
    config: &'a ExperimentConfig,
    provenance: BTreeMap<&'static str, &'static str>,
    rows: &'a [ResultRow],
}

fn write_summary_csv(table: &ResultTable, path: &Path) -> Result<(), RunError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record([
        "awareness_ratio",
        "method",
        "mean_probability",
        "std_error",
        "trials",
        "samples_per_trial",
        "level_means",
    ])?;
    for row in &table.rows {
        let level_means = row
            .level_means
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        writer.write_record([
            row.awareness_ratio.to_string(),
            row.method.to_string(),
            row.mean_probability.to_string(),
            row.std_error.to_string(),
            row.trials.to_string(),
            row.samples_per_trial.to_string(),
            level_means,
        ])?;
    }
    writer.flush()?;
    Ok(())
}

fn write_long_csv(table: &ResultTable, path: &Path) -> Result<(), RunError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["awareness_ratio", "method", "mean_probability"])?;
    for row in &table.rows {
        writer.write_record([
            row.awareness_ratio.to_string(),
            row.method.to_string(),
            row.mean_probability.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes result files under `dir` and returns the paths written.
///
/// CSV outputs hold only deterministic columns; the JSON document adds
/// wall time, per-trial values, the configuration and its provenance.
pub fn emit_results(
    table: &ResultTable,
    config: &ExperimentConfig,
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if matches!(format, OutputFormat::Csv | OutputFormat::All) {
        let summary = dir.join("results.csv");
        write_summary_csv(table, &summary)?;
        written.push(summary);
        let long = dir.join("sweep_long.csv");
        write_long_csv(table, &long)?;
        written.push(long);
    }
    if matches!(format, OutputFormat::Json | OutputFormat::All) {
        let document = ResultsDocument {
            version: env!("CARGO_PKG_VERSION"),
            master_seed: config.master_seed,
            config,
            provenance: ExperimentConfig::provenance(),
            rows: &table.rows,
        };
        let path = dir.join("results.json");
        let mut text = serde_json::to_string_pretty(&document)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        written.push(path);
    }
    Ok(written)
}
