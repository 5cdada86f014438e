use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ndarray::Array1;
use slog_core::baselines::{lambda_max, lambda_path, solve_cd, CdConfig};
use slog_core::{kkt_check, objective, solve_slog, PenaltySpec, SlogError, SolverResult};

use super::solve::IterationArgs;
use crate::{io, CliError, DataArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathAlgorithm {
    Slog,
    Cd,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Number of penalties, log-spaced from lambda_max down.
    #[arg(long, default_value_t = 50)]
    pub length: usize,
    /// Smallest penalty as a fraction of lambda_max.
    #[arg(long, default_value_t = 1e-2)]
    pub min_ratio: f64,
    #[arg(long, value_enum, default_value_t = PathAlgorithm::Slog)]
    pub algorithm: PathAlgorithm,
    #[command(flatten)]
    pub iteration: IterationArgs,
    /// Coordinate descent convergence threshold.
    #[arg(long, default_value_t = 1e-13)]
    pub cd_tol: f64,
    #[arg(long, default_value = "path.csv")]
    pub out: PathBuf,
}

fn partial_ok(r: slog_core::Result<SolverResult>) -> Result<SolverResult, CliError> {
    match r {
        Ok(r) => Ok(r),
        Err(SlogError::NotConverged(p)) => Ok(*p),
        Err(e) => Err(e.into()),
    }
}

pub fn run(args: &PathArgs, seed: u64) -> Result<(), CliError> {
    if args.length < 2 || !(args.min_ratio > 0.0 && args.min_ratio < 1.0) {
        return Err(CliError::Usage("need --length >= 2 and 0 < --min-ratio < 1".into()));
    }
    let problem = args.data.load()?;
    let lmax = lambda_max(&problem);
    let lambdas = lambda_path(lmax, lmax * args.min_ratio, args.length);
    let cfg = args.iteration.config(seed)?;

    let p = problem.p();
    let coef_header: Vec<String> = (1..=p).map(|j| format!("b{j}")).collect();
    let header = format!("lambda,nonzeros,objective,iterations,kkt_violation,converged,{}", coef_header.join(","));
    let mut rows = Vec::with_capacity(lambdas.len());
    let mut warm = Array1::<f64>::zeros(p);
    for &lambda in &lambdas {
        // SLOG restarts from its configured start: a zero can never revive.
        let result = match args.algorithm {
            PathAlgorithm::Slog => partial_ok(solve_slog(&problem, lambda, &cfg))?,
            PathAlgorithm::Cd => {
                let cd = CdConfig {
                    objective_tol: args.cd_tol,
                    start: Some(warm.clone()),
                    max_sweeps: args.iteration.max_iter,
                    ..CdConfig::single(lambda)
                };
                partial_ok(solve_cd(&problem, lambda, &cd, None))?
            }
        };
        let penalty = PenaltySpec::lasso(lambda);
        let b = &result.coefficients;
        let kkt = kkt_check(&problem, &penalty, b.view(), f64::INFINITY)?.max_violation;
        rows.push(format!(
            "{lambda},{},{},{},{kkt:e},{},{}",
            result.nonzeros(),
            objective(&problem, &penalty, b.view())?,
            result.iterations,
            result.converged,
            io::join(b.iter())
        ));
        warm = result.coefficients;
    }
    io::write_lines(&args.out, &header, &rows)?;
    println!("wrote {} penalties to {}", lambdas.len(), args.out.display());
    Ok(())
}
