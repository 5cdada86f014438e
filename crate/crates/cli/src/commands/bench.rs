use std::path::PathBuf;

use clap::{Args, ValueEnum};
use slog_core::bench::{run_grid, Algorithm, ComparisonMode, ExperimentGrid, RUNS_CSV_HEADER};

use crate::{io, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Each solver uses its own stopping rule.
    Free,
    /// Every solver stops once within --bound of the oracle solution.
    Match,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub s: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.95")]
    pub rho: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "100")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "300")]
    pub p: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// Any of slog, rslog, cd, ista, lai, aslog, enet, group, hybrid.
    #[arg(long, value_delimiter = ',', default_value = "rslog,cd")]
    pub algorithms: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Match)]
    pub mode: ModeArg,
    /// Relative distance to the oracle at which matched runs stop.
    #[arg(long, default_value_t = 1e-3)]
    pub bound: f64,
    /// rSLOG threshold.
    #[arg(long, default_value_t = 1e-13)]
    pub theta: f64,
    /// Step tolerance for free-running SLOG variants.
    #[arg(long, default_value_t = 1e-3)]
    pub step_tol: f64,
    /// Coordinate descent convergence threshold for free-running runs.
    #[arg(long, default_value_t = 1e-13)]
    pub cd_tol: f64,
    /// Worker threads; 1 keeps timings free of contention.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value = "runs.csv")]
    pub out: PathBuf,
}

pub fn run(args: &BenchArgs, seed: u64) -> Result<(), CliError> {
    let algorithms = args
        .algorithms
        .iter()
        .map(|a| a.parse::<Algorithm>())
        .collect::<Result<Vec<_>, _>>()?;
    let mut grid = ExperimentGrid::new(args.s.clone(), args.rho.clone(), args.n.clone(), args.p.clone(), algorithms);
    grid.replicates = args.replicates;
    grid.seed = seed;
    grid.jobs = args.jobs;
    grid.mode = match args.mode {
        ModeArg::Free => ComparisonMode::FreeRunning,
        ModeArg::Match => ComparisonMode::MatchReference { bound: args.bound },
    };
    grid.configs.rslog_threshold = args.theta;
    grid.configs.slog = grid.configs.slog.clone().with_step_tol(args.step_tol);
    grid.configs.cd.objective_tol = args.cd_tol;

    let records = run_grid(&grid)?;
    io::write_lines(&args.out, RUNS_CSV_HEADER, records.iter().map(|r| r.csv_row()))?;
    let failed = records.iter().filter(|r| !r.converged).count();
    println!("wrote {} runs to {} ({failed} not converged)", records.len(), args.out.display());
    for r in records.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "  s={} rho={} n={} p={} rep={} {}: {}",
            r.s,
            r.rho,
            r.n,
            r.p,
            r.replicate,
            r.algorithm,
            r.error.as_deref().unwrap_or("")
        );
    }
    Ok(())
}
