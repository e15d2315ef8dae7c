//! Command line front end for the estimation engine.
//!
//! `run` drives the full awareness sweep and writes result tables, `mc`
//! gives a quick single-point baseline, `ttc` scores recorded trajectory
//! files, `oracle` checks the estimator against reference models, and
//! `print-defaults` documents the configuration surface.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use reachsim::experiment::{
    emit_results, run_mc_point, run_sweep_with, toy_oracle_suite, ExperimentConfig, OutputFormat,
    ResultRow, ResultTable,
};
use reachsim::ttc::trace::{evaluate_trace, read_trace_csv, write_verdicts_csv, TraceSettings};
use reachsim::ttc::TtcPolicy;

#[derive(Parser)]
#[command(name = "reachsim", version, about = "Rare-event reach probability estimation for stochastic hybrid systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the awareness sweep with both estimators and write result files.
    Run(RunArgs),
    /// Run only the plain Monte Carlo baseline at one awareness scale.
    Mc(McArgs),
    /// Evaluate time-to-collision over a recorded trajectory CSV.
    Ttc(TtcArgs),
    /// Check the estimator against reference models with known answers.
    Oracle(OracleArgs),
    /// Print the default configuration as annotated TOML.
    PrintDefaults,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file; omitted means built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the number of splitting trials per sweep point.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the particles per splitting trial.
    #[arg(long)]
    particles: Option<usize>,
    /// Override the Monte Carlo baseline size; 0 skips the baseline.
    #[arg(long)]
    mc_runs: Option<usize>,
    #[arg(long, value_enum, default_value_t = FormatArg::All)]
    format: FormatArg,
}

#[derive(Args)]
struct McArgs {
    /// TOML configuration file; omitted means built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Awareness ellipse scale to evaluate.
    #[arg(long)]
    ratio: f64,
    /// Override the number of runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TtcArgs {
    /// Input trajectory CSV with columns vehicle,t,x,y and optional
    /// vx,vy,ax,ay,lane; use - for standard input.
    input: PathBuf,
    /// Output verdict CSV; omitted writes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Vehicle id to treat as the subject; default is the first id seen.
    #[arg(long)]
    subject: Option<String>,
    /// Lead vehicle body length in meters.
    #[arg(long, default_value_t = 4.508)]
    lead_length: f64,
    #[arg(long, value_enum, default_value_t = PolicyArg::MinPositiveReal)]
    policy: PolicyArg,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Splitting trials per reference case.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Particles per splitting trial.
    #[arg(long, default_value_t = 100)]
    particles: usize,
    /// Fail if any relative error exceeds this bound.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    All,
}

impl From<FormatArg> for OutputFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::All => OutputFormat::All,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum PolicyArg {
    MinPositiveReal,
    AllRootsPositive,
}

impl From<PolicyArg> for TtcPolicy {
    fn from(arg: PolicyArg) -> Self {
        match arg {
            PolicyArg::MinPositiveReal => TtcPolicy::MinPositiveReal,
            PolicyArg::AllRootsPositive => TtcPolicy::AllRootsPositive,
        }
    }
}

fn load_config(path: Option<&Path>) -> anyhow::Result<ExperimentConfig> {
    match path {
        Some(p) => {
            ExperimentConfig::from_path(p).with_context(|| format!("loading {}", p.display()))
        }
        None => Ok(ExperimentConfig::default()),
    }
}

fn progress_line(row: &ResultRow) -> String {
    format!(
        "mu = {:<7} {:<12} p = {:.4e}  se = {:.1e}  ({} x {}, {:.1} s)",
        row.awareness_ratio,
        row.method.to_string(),
        row.mean_probability,
        row.std_error,
        row.trials,
        row.samples_per_trial,
        row.wall_seconds
    )
}

fn cmd_run(args: RunArgs) -> anyhow::Result<()> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(trials) = args.trials {
        config.trials = trials;
    }
    if let Some(particles) = args.particles {
        config.particles = particles;
    }
    if let Some(mc_runs) = args.mc_runs {
        config.mc_runs = mc_runs;
    }
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output_dir));
    let format = OutputFormat::from(args.format);

    // Flush the table after every finished row, so an interrupted sweep
    // still leaves the completed points on disk.
    let mut partial = ResultTable::default();
    let table = run_sweep_with(&config, |row| {
        println!("{}", progress_line(row));
        partial.rows.push(row.clone());
        if let Err(e) = emit_results(&partial, &config, &out_dir, format) {
            eprintln!("warning: cannot flush partial results: {e}");
        }
    })?;
    let written = emit_results(&table, &config, &out_dir, format)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_mc(args: McArgs) -> anyhow::Result<()> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(runs) = args.runs {
        config.mc_runs = runs;
    }
    let row = run_mc_point(&config, args.ratio)?;
    println!("{}", progress_line(&row));
    Ok(())
}

fn cmd_ttc(args: TtcArgs) -> anyhow::Result<()> {
    let rows = if args.input.as_os_str() == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        read_trace_csv(text.as_bytes())?
    } else {
        let file = File::open(&args.input)
            .with_context(|| format!("opening {}", args.input.display()))?;
        read_trace_csv(file)?
    };
    let settings = TraceSettings {
        subject: args.subject,
        lead_length: args.lead_length,
        policy: args.policy.into(),
    };
    let verdicts = evaluate_trace(&rows, &settings)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            write_verdicts_csv(file, &verdicts)?;
            println!("wrote {} verdicts to {}", verdicts.len(), path.display());
        }
        None => {
            let stdout = io::stdout();
            write_verdicts_csv(stdout.lock(), &verdicts)?;
        }
    }
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> anyhow::Result<()> {
    let report = toy_oracle_suite(args.seed, args.trials, args.particles)?;
    let mut out = io::stdout().lock();
    writeln!(
        out,
        "{:<36} {:>12} {:>12} {:>10} {:>10}",
        "case", "oracle", "estimate", "rel_err", "se"
    )?;
    for case in &report.cases {
        writeln!(
            out,
            "{:<36} {:>12.5e} {:>12.5e} {:>10.4} {:>10.2e}",
            case.name, case.oracle, case.estimate, case.rel_error, case.std_error
        )?;
    }
    if let Some(tolerance) = args.tolerance {
        if !report.all_within(tolerance) {
            anyhow::bail!(
                "max relative error {:.4} exceeds tolerance {tolerance}",
                report.max_rel_error()
            );
        }
        writeln!(out, "all cases within {tolerance}")?;
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run(args) => cmd_run(args),
        Command::Mc(args) => cmd_mc(args),
        Command::Ttc(args) => cmd_ttc(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::PrintDefaults => {
            print!("{}", ExperimentConfig::annotated_default_toml());
            Ok(())
        }
    }
}
