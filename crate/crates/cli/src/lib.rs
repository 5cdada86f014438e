//! Command-line frontend for the SLOG solver toolkit.
//!
//! Exit codes: 0 success, 1 solver failure, 2 usage error, 3 I/O error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use slog_core::simdata::CoefficientRule;
use slog_core::{SlogError, StartStrategy};
use thiserror::Error;

pub mod commands;
pub mod io;

/// Seed used when neither `--seed` nor `SLOG_LAB_SEED` is given.
pub const DEFAULT_SEED: u64 = 1729;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Solver(_) => 1,
            Self::Usage(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl From<SlogError> for CliError {
    fn from(e: SlogError) -> Self {
        match e {
            SlogError::NotConverged(_) | SlogError::SingularSystem | SlogError::Unachievable { .. } => Self::Solver(e.to_string()),
            _ => Self::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "slog-lab", version, about = "Lasso-family solvers built on the SLOG recursion")]
pub struct Cli {
    /// Seed for data generation, random starts and fold assignment.
    #[arg(long, global = true, env = "SLOG_LAB_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic regression dataset.
    Simulate(commands::simulate::SimulateArgs),
    /// Fit one penalty and write a JSON result.
    Solve(commands::solve::SolveArgs),
    /// Fit a log-spaced sequence of penalties.
    Path(commands::path::PathArgs),
    /// Run a benchmark grid and write runs.csv.
    Bench(commands::bench::BenchArgs),
    /// Cross-validate over sparsity levels.
    Cv(commands::cv::CvArgs),
    /// Per-iteration distance traces of several solvers on one problem.
    Compare(commands::compare::CompareArgs),
}

/// Design and response files.
#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Design CSV (header row, one column per predictor).
    #[arg(long = "x")]
    pub x: PathBuf,
    /// Response CSV (header row, one column).
    #[arg(long = "y")]
    pub y: PathBuf,
}

impl DataArgs {
    pub fn load(&self) -> Result<slog_core::RegressionProblem, CliError> {
        let x = io::read_matrix(&self.x)?;
        let y = io::read_vector(&self.y)?;
        Ok(slog_core::standardize(x.view(), y.view())?)
    }
}

fn parse_fields<const N: usize>(spec: &str, what: &str) -> Result<[f64; N], CliError> {
    let parts: Vec<&str> = spec.split(':').skip(1).collect();
    if parts.len() != N {
        return Err(CliError::Usage(format!("{what} '{spec}' needs {N} ':'-separated numbers")));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .parse()
            .map_err(|_| CliError::Usage(format!("bad number '{p}' in {what} '{spec}'")))?;
    }
    Ok(out)
}

/// `alternating`, `constant:<v>`, `subset:<fraction>:<value>` or `uniform:<low>:<high>`.
pub fn parse_rule(spec: &str) -> Result<CoefficientRule, CliError> {
    match spec.split(':').next().unwrap_or("") {
        "alternating" if spec == "alternating" => Ok(CoefficientRule::Alternating),
        "constant" => {
            let [v] = parse_fields(spec, "rule")?;
            Ok(CoefficientRule::Constant(v))
        }
        "subset" => {
            let [fraction, value] = parse_fields(spec, "rule")?;
            Ok(CoefficientRule::SubsetConstant { fraction, value })
        }
        "uniform" => {
            let [low, high] = parse_fields(spec, "rule")?;
            Ok(CoefficientRule::UniformRange { low, high })
        }
        _ => Err(CliError::Usage(format!("unknown coefficient rule '{spec}'"))),
    }
}

/// `uninformed`, `constant:<v>` or `random:<lower>:<upper>` (seeded by `--seed`).
pub fn parse_start(spec: &str, seed: u64) -> Result<StartStrategy, CliError> {
    match spec.split(':').next().unwrap_or("") {
        "uninformed" if spec == "uninformed" => Ok(StartStrategy::Uninformed),
        "constant" => {
            let [v] = parse_fields(spec, "start")?;
            Ok(StartStrategy::Constant(v))
        }
        "random" => {
            let [lower, upper] = parse_fields(spec, "start")?;
            Ok(StartStrategy::Random { lower, upper, seed })
        }
        _ => Err(CliError::Usage(format!("unknown start '{spec}'"))),
    }
}

/// Parses the arguments and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
