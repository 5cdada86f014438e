use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;
use slog_core::baselines::{run_ista, solve_cd, solve_lai_irls, CdConfig, LaiConfig, OracleConfig};
use slog_core::simdata::{calibrate_lambda, SparsityTarget};
use slog_core::variants::{solve_aslog, solve_enet_slog, solve_group_slog, solve_hybrid, AnnealSchedule, BlockPartition, BlockSolver};
use slog_core::{kkt_check, Groups, Inversion, PenaltySpec, RegressionProblem, SlogError, SolverConfig, SolverResult};

use crate::{io, parse_start, CliError, DataArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveAlgorithm {
    Slog,
    Cd,
    Ista,
    Lai,
    Aslog,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyKind {
    Lasso,
    Enet,
    Group,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InversionArg {
    Auto,
    Naive,
    Woodbury,
    Miller,
}

impl From<InversionArg> for Inversion {
    fn from(v: InversionArg) -> Self {
        match v {
            InversionArg::Auto => Inversion::Auto,
            InversionArg::Naive => Inversion::Naive,
            InversionArg::Woodbury => Inversion::Woodbury,
            InversionArg::Miller => Inversion::Miller,
        }
    }
}

/// Either an explicit penalty or a sparsity level to calibrate it to.
#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct StrengthArgs {
    /// Penalty strength (lambda, or lambda1 for the elastic net).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Sparsity level in [0, 1]: the penalty is calibrated so that a
    /// fraction `s` of min(n, p) coefficients is zero.
    #[arg(long)]
    pub s: Option<f64>,
}

impl StrengthArgs {
    pub fn resolve(&self, problem: &RegressionProblem) -> Result<f64, CliError> {
        match (self.lambda, self.s) {
            (Some(l), _) => Ok(l),
            (None, Some(s)) => Ok(calibrate_lambda(problem, SparsityTarget::new(s)?)?.lambda),
            (None, None) => Err(CliError::Usage("one of --lambda or --s is required".into())),
        }
    }
}

/// Settings shared by the SLOG-style solvers.
#[derive(Debug, Clone, Args, Serialize)]
pub struct IterationArgs {
    /// rSLOG threshold; 0 gives plain SLOG.
    #[arg(long, default_value_t = 1e-13)]
    pub theta: f64,
    /// Stop once the relative change between iterates drops below this.
    #[arg(long, default_value_t = 1e-3)]
    pub step_tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iter: usize,
    /// uninformed | constant:<v> | random:<lower>:<upper>
    #[arg(long, default_value = "uninformed")]
    pub start: String,
    #[arg(long, value_enum, default_value_t = InversionArg::Auto)]
    pub inversion: InversionArg,
}

impl IterationArgs {
    pub fn config(&self, seed: u64) -> Result<SolverConfig, CliError> {
        Ok(SolverConfig::default()
            .with_threshold(self.theta)
            .with_step_tol(self.step_tol)
            .with_max_iter(self.max_iter)
            .with_start(parse_start(&self.start, seed)?)
            .with_inversion(self.inversion.into()))
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub strength: StrengthArgs,
    #[arg(long, value_enum, default_value_t = PenaltyKind::Lasso)]
    pub penalty: PenaltyKind,
    /// Ridge strength for the elastic net.
    #[arg(long, default_value_t = 1.0)]
    pub lambda2: f64,
    /// Size of the contiguous column groups for the group lasso.
    #[arg(long, default_value_t = 2)]
    pub group_size: usize,
    #[arg(long, value_enum, default_value_t = SolveAlgorithm::Slog)]
    pub algorithm: SolveAlgorithm,
    #[command(flatten)]
    pub iteration: IterationArgs,
    /// Coordinate descent: per-penalty convergence threshold (relative to ||y||^2).
    #[arg(long, default_value_t = 1e-13)]
    pub cd_tol: f64,
    /// Coordinate descent: length of the warm-start penalty path.
    #[arg(long, default_value_t = 50)]
    pub path_length: usize,
    /// Oracle: KKT tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub oracle_tol: f64,
    /// Lai IRLS: smoothing decay factor.
    #[arg(long, default_value_t = 0.9)]
    pub lai_alpha: f64,
    /// Lai IRLS: zero-based rank of the magnitude driving the smoothing
    /// [default: min(10, p - 1)].
    #[arg(long)]
    pub lai_h: Option<usize>,
    /// Annealed SLOG: initial variance.
    #[arg(long, default_value_t = 1e-7)]
    pub sigma2: f64,
    /// Annealed SLOG: per-iteration variance multiplier.
    #[arg(long, default_value_t = 0.99)]
    pub decay: f64,
    /// Hybrid: number of contiguous column blocks.
    #[arg(long, default_value_t = 2)]
    pub blocks: usize,
    /// Exit 0 and keep the result even if the solver hits its iteration cap.
    #[arg(long)]
    pub allow_partial: bool,
    #[arg(long, default_value = "result.json")]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    penalty: PenaltyKind,
    lambda2: Option<f64>,
    group_size: Option<usize>,
    #[serde(flatten)]
    iteration: &'a IterationArgs,
    cd_tol: f64,
    path_length: usize,
    oracle_tol: f64,
    lai_alpha: f64,
    lai_h: Option<usize>,
    sigma2: f64,
    decay: f64,
    blocks: usize,
    seed: u64,
}

#[derive(Serialize)]
pub struct SolveOutput<'a> {
    pub schema: u32,
    pub algorithm: SolveAlgorithm,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: String,
    pub kkt_max_violation: f64,
    pub nonzeros: usize,
    pub wall_time_ms: f64,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub coefficients_standardized: Vec<f64>,
    config: ConfigEcho<'a>,
}

fn contiguous_groups(p: usize, size: usize) -> Result<Groups, CliError> {
    if size == 0 {
        return Err(CliError::Usage("--group-size must be >= 1".into()));
    }
    let mut sizes = vec![size; p / size];
    if !p.is_multiple_of(size) {
        sizes.push(p % size);
    }
    Ok(Groups::contiguous(&sizes)?)
}

fn fit(args: &SolveArgs, problem: &RegressionProblem, lambda: f64, penalty: &PenaltySpec, seed: u64) -> Result<slog_core::Result<SolverResult>, CliError> {
    let cfg = args.iteration.config(seed)?;
    let p = problem.p();
    if args.penalty != PenaltyKind::Lasso && !matches!(args.algorithm, SolveAlgorithm::Slog | SolveAlgorithm::Ista) {
        return Err(CliError::Usage("elastic-net and group penalties need --algorithm slog or ista".into()));
    }
    Ok(match (args.algorithm, penalty) {
        (SolveAlgorithm::Ista, _) => run_ista(problem, penalty, &OracleConfig::new(args.oracle_tol)),
        (SolveAlgorithm::Slog, PenaltySpec::ElasticNet { lambda1, lambda2 }) => solve_enet_slog(problem, *lambda1, *lambda2, &cfg),
        (SolveAlgorithm::Slog, PenaltySpec::GroupLasso { lambda, groups }) => solve_group_slog(problem, *lambda, groups, &cfg),
        (SolveAlgorithm::Slog, _) => slog_core::solve_slog(problem, lambda, &cfg),
        (SolveAlgorithm::Cd, _) => {
            let cd = CdConfig {
                objective_tol: args.cd_tol,
                path_length: args.path_length,
                max_sweeps: args.iteration.max_iter,
                ..CdConfig::default()
            };
            solve_cd(problem, lambda, &cd, None)
        }
        (SolveAlgorithm::Lai, _) => {
            let h = args.lai_h.unwrap_or(10.min(p - 1));
            if h >= p {
                return Err(CliError::Usage(format!("--lai-h must be below p = {p}")));
            }
            let lai = LaiConfig {
                solver: cfg,
                ..LaiConfig::new(args.lai_alpha, h)
            };
            solve_lai_irls(problem, lambda, &lai)
        }
        (SolveAlgorithm::Aslog, _) => {
            let schedule = AnnealSchedule {
                sigma2_init: args.sigma2,
                decay: args.decay,
                seed,
            };
            solve_aslog(problem, lambda, &schedule, &cfg)
        }
        (SolveAlgorithm::Hybrid, _) => {
            let count = args.blocks.clamp(1, p);
            let blocks: Vec<Vec<usize>> = (0..count)
                .map(|b| (b * p / count..(b + 1) * p / count).collect())
                .collect();
            let partition = BlockPartition::new(blocks, vec![BlockSolver::Slog; count]);
            solve_hybrid(problem, lambda, &partition, &cfg).map(|o| o.result)
        }
    })
}

pub fn run(args: &SolveArgs, seed: u64) -> Result<(), CliError> {
    let problem = args.data.load()?;
    let lambda = args.strength.resolve(&problem)?;
    let penalty = match args.penalty {
        PenaltyKind::Lasso => PenaltySpec::lasso(lambda),
        PenaltyKind::Enet => PenaltySpec::ElasticNet {
            lambda1: lambda,
            lambda2: args.lambda2,
        },
        PenaltyKind::Group => PenaltySpec::GroupLasso {
            lambda,
            groups: contiguous_groups(problem.p(), args.group_size)?,
        },
    };
    penalty.validate(problem.p())?;

    let (result, failure) = match fit(args, &problem, lambda, &penalty, seed)? {
        Ok(r) => (r, None),
        Err(SlogError::NotConverged(partial)) => {
            let msg = format!("solver stopped after {} iterations without converging", partial.iterations);
            (*partial, Some(msg))
        }
        Err(e) => return Err(e.into()),
    };

    let kkt = kkt_check(&problem, &penalty, result.coefficients.view(), f64::INFINITY)?.max_violation;
    let (intercept, slopes) = problem.standardization().original_coefficients(result.coefficients.view());
    let output = SolveOutput {
        schema: 1,
        algorithm: args.algorithm,
        lambda,
        iterations: result.iterations,
        converged: result.converged,
        stop_reason: format!("{:?}", result.stop_reason),
        kkt_max_violation: kkt,
        nonzeros: result.nonzeros(),
        wall_time_ms: result.wall_time.as_secs_f64() * 1e3,
        intercept,
        coefficients: slopes.to_vec(),
        coefficients_standardized: result.coefficients.to_vec(),
        config: ConfigEcho {
            penalty: args.penalty,
            lambda2: (args.penalty == PenaltyKind::Enet).then_some(args.lambda2),
            group_size: (args.penalty == PenaltyKind::Group).then_some(args.group_size),
            iteration: &args.iteration,
            cd_tol: args.cd_tol,
            path_length: args.path_length,
            oracle_tol: args.oracle_tol,
            lai_alpha: args.lai_alpha,
            lai_h: args.lai_h,
            sigma2: args.sigma2,
            decay: args.decay,
            blocks: args.blocks,
            seed,
        },
    };
    io::write_json(&args.out, &output)?;
    println!(
        "{:?}: lambda={lambda:.6e} iterations={} nonzeros={} kkt={kkt:.3e} converged={} ({:.1} ms)",
        args.algorithm,
        output.iterations,
        output.nonzeros,
        output.converged,
        output.wall_time_ms
    );
    match failure {
        Some(msg) if !args.allow_partial => Err(CliError::Solver(msg)),
        _ => Ok(()),
    }
}
