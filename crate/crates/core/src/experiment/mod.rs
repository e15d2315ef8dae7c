//! Sweep orchestration: configuration, execution, emission, calibration.
//!
//! The pieces compose in that order: a [`config::ExperimentConfig`] names
//! every knob of a run, [`run::run_sweep`] walks the awareness scales with
//! both estimators, [`run::emit_results`] writes the tables, and
//! [`oracle::toy_oracle_suite`] checks the estimator against reference
//! models before anyone trusts the scenario numbers.

pub mod config;
pub mod oracle;
pub mod run;

pub use config::{ConfigError, ExperimentConfig, SteeringConfig, VehicleConfig};
pub use oracle::{toy_oracle_suite, OracleCase, OracleKind, OracleReport};
pub use run::{
    emit_results, run_mc_point, run_sweep, run_sweep_with, Method, OutputFormat, ResultRow,
    ResultTable, RunError,
};
