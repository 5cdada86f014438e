use std::path::PathBuf;

use clap::Args;
use slog_core::baselines::{solve_cd, solve_ista, CdConfig};
use slog_core::bench::Algorithm;
use slog_core::simdata::{generate, SimulationSpec};
use slog_core::slog::start_vector;
use slog_core::{objective, solve_slog, PenaltySpec, Reference, RegressionProblem, SlogError, SolverConfig, SolverResult};

use super::solve::StrengthArgs;
use crate::{io, parse_rule, parse_start, CliError};

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Design CSV; omit both --x and --y to simulate instead.
    #[arg(long = "x", requires = "y")]
    pub x: Option<PathBuf>,
    #[arg(long = "y", requires = "x")]
    pub y: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub p: usize,
    #[arg(long, default_value_t = 0.99)]
    pub rho: f64,
    #[arg(long, default_value = "alternating")]
    pub rule: String,
    #[command(flatten)]
    pub strength: StrengthArgs,
    /// Common start for every solver: uninformed | constant:<v> | random:<lower>:<upper>
    #[arg(long, default_value = "uninformed")]
    pub start: String,
    /// Solvers to trace: any of slog, rslog, cd.
    #[arg(long, value_delimiter = ',', default_value = "slog,rslog,cd")]
    pub algorithms: Vec<String>,
    /// Stop each solver once its relative distance to the oracle is below this.
    #[arg(long, default_value_t = 1e-6)]
    pub bound: f64,
    #[arg(long, default_value_t = 1e-13)]
    pub theta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    #[arg(long, default_value = "compare.csv")]
    pub out: PathBuf,
}

fn load(args: &CompareArgs, seed: u64) -> Result<RegressionProblem, CliError> {
    match (&args.x, &args.y) {
        (Some(x), Some(y)) => crate::DataArgs { x: x.clone(), y: y.clone() }.load(),
        _ => {
            let spec = SimulationSpec {
                rule: parse_rule(&args.rule)?,
                ..SimulationSpec::new(args.n, args.p, args.rho, seed)
            };
            Ok(generate(&spec)?.problem)
        }
    }
}

pub fn run(args: &CompareArgs, seed: u64) -> Result<(), CliError> {
    let problem = load(args, seed)?;
    let lambda = args.strength.resolve(&problem)?;
    let penalty = PenaltySpec::lasso(lambda);
    let oracle = solve_ista(&problem, &penalty, 1e-10)?;
    let reference = Reference::stopping_at(oracle.clone(), args.bound);
    let start = parse_start(&args.start, seed)?;
    let b0 = start_vector(&problem, lambda, &start);
    let d0 = reference.distance(b0.view());
    let obj0 = objective(&problem, &penalty, b0.view())?;
    let active0 = b0.iter().filter(|v| **v != 0.0).count();

    let mut rows = Vec::new();
    for name in &args.algorithms {
        let algorithm: Algorithm = name.parse()?;
        let slog_cfg = |theta: f64| {
            SolverConfig::default()
                .with_threshold(theta)
                .with_step_tol(f64::MIN_POSITIVE)
                .with_max_iter(args.max_iter)
                .with_start(start.clone())
                .with_reference(reference.clone())
        };
        let outcome = match algorithm {
            Algorithm::Slog => solve_slog(&problem, lambda, &slog_cfg(0.0)),
            Algorithm::Rslog => solve_slog(&problem, lambda, &slog_cfg(args.theta)),
            Algorithm::Cd => {
                let cd = CdConfig {
                    objective_tol: 0.0,
                    max_sweeps: args.max_iter,
                    start: Some(b0.clone()),
                    ..CdConfig::single(lambda)
                };
                solve_cd(&problem, lambda, &cd, Some(&reference))
            }
            other => return Err(CliError::Usage(format!("compare supports slog, rslog and cd, not {other}"))),
        };
        let result: SolverResult = match outcome {
            Ok(r) => r,
            Err(SlogError::NotConverged(p)) => *p,
            Err(e) => return Err(e.into()),
        };
        rows.push(format!("0,{algorithm},{d0:e},{obj0},{active0}"));
        for t in &result.trace {
            let d = t.dist_to_ref.unwrap_or(f64::NAN);
            rows.push(format!("{},{algorithm},{d:e},{},{}", t.iteration, t.objective, t.active));
        }
        let last = result.trace.last().and_then(|t| t.dist_to_ref).unwrap_or(d0);
        println!("{algorithm}: {} iterations, final distance {last:.3e}", result.iterations);
    }
    io::write_lines(&args.out, "iteration,algorithm,dist_to_ref,objective,active_count", &rows)?;
    Ok(())
}
