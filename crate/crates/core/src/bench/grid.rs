//! Benchmark grids over simulated data.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use ndarray::Array1;
use rayon::prelude::*;

use crate::baselines::{run_ista, solve_cd, solve_ista_with, solve_lai_irls, CdConfig, LaiConfig, OracleConfig};
use crate::error::{Result, SlogError};
use crate::kkt::kkt_check;
use crate::penalty::{Groups, PenaltySpec};
use crate::problem::RegressionProblem;
use crate::simdata::{calibrate_lambda, generate, CoefficientRule, SimulationSpec, SparsityTarget};
use crate::slog::{solve_slog, start_vector, SolverConfig, StartStrategy};
use crate::trace::{relative_distance, Reference, SolverResult};
use crate::variants::{solve_aslog, solve_enet_slog, solve_group_slog, solve_hybrid, AnnealSchedule, BlockPartition, BlockSolver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Slog,
    Rslog,
    Cd,
    Ista,
    LaiIrls,
    Aslog,
    EnetSlog,
    GroupSlog,
    Hybrid,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Self::Slog,
        Self::Rslog,
        Self::Cd,
        Self::Ista,
        Self::LaiIrls,
        Self::Aslog,
        Self::EnetSlog,
        Self::GroupSlog,
        Self::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Slog => "slog",
            Self::Rslog => "rslog",
            Self::Cd => "cd",
            Self::Ista => "ista",
            Self::LaiIrls => "lai",
            Self::Aslog => "aslog",
            Self::EnetSlog => "enet",
            Self::GroupSlog => "group",
            Self::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = SlogError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| SlogError::InvalidConfig(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComparisonMode {
    /// Every solver uses its own stopping rule.
    FreeRunning,
    /// Every solver starts from the uninformed start and stops as soon as it
    /// is within `bound` (relative distance) of the oracle solution.
    MatchReference { bound: f64 },
}

/// Per-algorithm settings used by [`run_grid`].
#[derive(Debug, Clone)]
pub struct AlgorithmConfigs {
    pub slog: SolverConfig,
    pub rslog_threshold: f64,
    pub cd: CdConfig,
    pub lai: LaiConfig,
    pub anneal: AnnealSchedule,
    pub enet_lambda2: f64,
    pub group_size: usize,
    pub hybrid_blocks: usize,
    /// Replace `lai.h` by the cell's target number of nonzeros plus ten.
    pub lai_rank_from_target: bool,
    /// KKT tolerance the oracle is certified at.
    pub oracle_tol: f64,
}

impl Default for AlgorithmConfigs {
    fn default() -> Self {
        Self {
            slog: SolverConfig::default().with_threshold(0.0),
            rslog_threshold: 1e-13,
            cd: CdConfig::default(),
            lai: LaiConfig {
                solver: SolverConfig::default().with_max_iter(20_000),
                ..LaiConfig::new(0.9, 0)
            },
            anneal: AnnealSchedule::default(),
            enet_lambda2: 1.0,
            group_size: 2,
            hybrid_blocks: 2,
            lai_rank_from_target: true,
            oracle_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentGrid {
    pub s: Vec<f64>,
    pub rho: Vec<f64>,
    pub n: Vec<usize>,
    pub p: Vec<usize>,
    pub replicates: usize,
    pub algorithms: Vec<Algorithm>,
    pub configs: AlgorithmConfigs,
    pub mode: ComparisonMode,
    pub rule: CoefficientRule,
    pub snr: f64,
    /// Seed of the first dataset; later datasets count up from it.
    pub seed: u64,
    /// Worker threads. One keeps wall times free of contention.
    pub jobs: usize,
    /// When set, a record only counts as converged if its final KKT
    /// violation is at most this.
    pub certify_tol: Option<f64>,
}

impl ExperimentGrid {
    pub fn new(s: Vec<f64>, rho: Vec<f64>, n: Vec<usize>, p: Vec<usize>, algorithms: Vec<Algorithm>) -> Self {
        Self {
            s,
            rho,
            n,
            p,
            replicates: 1,
            algorithms,
            configs: AlgorithmConfigs::default(),
            mode: ComparisonMode::FreeRunning,
            rule: CoefficientRule::Alternating,
            snr: 3.0,
            seed: 0,
            jobs: 1,
            certify_tol: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(SlogError::InvalidConfig("replicates must be >= 1".into()));
        }
        if self.s.is_empty() || self.rho.is_empty() || self.n.is_empty() || self.p.is_empty() || self.algorithms.is_empty() {
            return Err(SlogError::InvalidConfig("every grid axis needs at least one value".into()));
        }
        if self.jobs == 0 {
            return Err(SlogError::InvalidConfig("jobs must be >= 1".into()));
        }
        if let ComparisonMode::MatchReference { bound } = self.mode {
            if !(bound > 0.0) {
                return Err(SlogError::InvalidConfig("reference bound must be > 0".into()));
            }
        }
        for &s in &self.s {
            SparsityTarget::new(s)?;
        }
        Ok(())
    }

    /// Cells in output order: `s` outermost, then `rho`, `n`, `p`.
    pub fn cells(&self) -> Vec<(f64, f64, usize, usize)> {
        let mut cells = Vec::new();
        for &s in &self.s {
            for &rho in &self.rho {
                for &n in &self.n {
                    for &p in &self.p {
                        cells.push((s, rho, n, p));
                    }
                }
            }
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub s: f64,
    pub rho: f64,
    pub n: usize,
    pub p: usize,
    pub replicate: usize,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub lambda: f64,
    pub iterations: usize,
    pub wall_time: Duration,
    pub dist_to_ref: f64,
    pub kkt_violation: f64,
    pub nonzeros: usize,
    pub converged: bool,
    /// Why the run failed, when it did.
    pub error: Option<String>,
}

/// Header of the CSV written for a list of records.
pub const RUNS_CSV_HEADER: &str = "s,rho,n,p,replicate,seed,algorithm,iterations,wall_time_ms,dist_to_ref,kkt_violation,nonzeros,converged";

impl RunRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{:e},{:e},{},{}",
            self.s,
            self.rho,
            self.n,
            self.p,
            self.replicate,
            self.seed,
            self.algorithm,
            self.iterations,
            self.wall_time.as_secs_f64() * 1e3,
            self.dist_to_ref,
            self.kkt_violation,
            self.nonzeros,
            self.converged
        )
    }
}

/// Lazily computed oracle solutions, one per penalty family.
struct Oracles<'a> {
    problem: &'a RegressionProblem,
    tol: f64,
    lasso: Option<Array1<f64>>,
    enet: Option<Array1<f64>>,
    group: Option<Array1<f64>>,
}

impl Oracles<'_> {
    fn get(&mut self, penalty: &PenaltySpec) -> Result<Array1<f64>> {
        let slot = match penalty {
            PenaltySpec::Lasso { .. } => &mut self.lasso,
            PenaltySpec::ElasticNet { .. } => &mut self.enet,
            PenaltySpec::GroupLasso { .. } => &mut self.group,
        };
        if slot.is_none() {
            *slot = Some(solve_ista_with(self.problem, penalty, &OracleConfig::new(self.tol))?);
        }
        Ok(slot.clone().unwrap())
    }
}

fn contiguous_blocks(p: usize, count: usize) -> Vec<Vec<usize>> {
    let count = count.clamp(1, p);
    let base = p / count;
    let extra = p % count;
    let mut blocks = Vec::with_capacity(count);
    let mut next = 0;
    for b in 0..count {
        let len = base + usize::from(b < extra);
        blocks.push((next..next + len).collect());
        next += len;
    }
    blocks
}

fn group_partition(p: usize, size: usize) -> Result<Groups> {
    let size = size.max(1);
    let mut sizes = vec![size; p / size];
    if !p.is_multiple_of(size) {
        sizes.push(p % size);
    }
    Groups::contiguous(&sizes)
}

fn penalty_for(algorithm: Algorithm, lambda: f64, p: usize, configs: &AlgorithmConfigs) -> Result<PenaltySpec> {
    Ok(match algorithm {
        Algorithm::EnetSlog => PenaltySpec::ElasticNet {
            lambda1: lambda,
            lambda2: configs.enet_lambda2,
        },
        Algorithm::GroupSlog => PenaltySpec::GroupLasso {
            lambda,
            groups: group_partition(p, configs.group_size)?,
        },
        _ => PenaltySpec::lasso(lambda),
    })
}

fn solver_config(base: &SolverConfig, threshold: f64, mode: ComparisonMode, oracle: &Array1<f64>) -> SolverConfig {
    let mut cfg = base.clone().with_threshold(threshold);
    if let ComparisonMode::MatchReference { bound } = mode {
        cfg = cfg
            .with_start(StartStrategy::Uninformed)
            .with_step_tol(f64::MIN_POSITIVE)
            .with_reference(Reference::stopping_at(oracle.clone(), bound));
    }
    cfg
}

#[allow(clippy::too_many_arguments)]
fn run_algorithm(
    problem: &RegressionProblem,
    algorithm: Algorithm,
    lambda: f64,
    target: usize,
    penalty: &PenaltySpec,
    oracle: &Array1<f64>,
    configs: &AlgorithmConfigs,
    mode: ComparisonMode,
) -> Result<SolverResult> {
    let cfg = |threshold| solver_config(&configs.slog, threshold, mode, oracle);
    match algorithm {
        Algorithm::Slog => solve_slog(problem, lambda, &cfg(0.0)),
        Algorithm::Rslog => solve_slog(problem, lambda, &cfg(configs.rslog_threshold)),
        Algorithm::Cd => match mode {
            ComparisonMode::FreeRunning => solve_cd(problem, lambda, &configs.cd, None),
            ComparisonMode::MatchReference { bound } => {
                let cd = CdConfig {
                    start: Some(start_vector(problem, lambda, &StartStrategy::Uninformed)),
                    objective_tol: 0.0,
                    final_objective_tol: None,
                    ..CdConfig {
                        lambda_sequence: Some(vec![lambda]),
                        ..configs.cd.clone()
                    }
                };
                solve_cd(problem, lambda, &cd, Some(&Reference::stopping_at(oracle.clone(), bound)))
            }
        },
        Algorithm::Ista => run_ista(problem, penalty, &OracleConfig::new(configs.oracle_tol)),
        Algorithm::LaiIrls => {
            let mut lai = configs.lai.clone();
            if configs.lai_rank_from_target {
                lai.h = (target + 10).min(problem.p() - 1);
            }
            lai.solver = solver_config(&lai.solver, lai.solver.threshold, mode, oracle);
            solve_lai_irls(problem, lambda, &lai)
        }
        Algorithm::Aslog => solve_aslog(problem, lambda, &configs.anneal, &cfg(0.0)),
        Algorithm::EnetSlog => solve_enet_slog(problem, lambda, configs.enet_lambda2, &cfg(0.0)),
        Algorithm::GroupSlog => {
            let PenaltySpec::GroupLasso { groups, .. } = penalty else {
                unreachable!("group penalty expected")
            };
            solve_group_slog(problem, lambda, groups, &cfg(0.0))
        }
        Algorithm::Hybrid => {
            let blocks = contiguous_blocks(problem.p(), configs.hybrid_blocks);
            let solvers = vec![BlockSolver::Slog; blocks.len()];
            let mut partition = BlockPartition::new(blocks, solvers);
            partition.block_step_tol = Some(configs.slog.step_tol);
            let out = solve_hybrid(problem, lambda, &partition, &cfg(configs.rslog_threshold))?;
            let mut result = out.result;
            result.iterations += out.blocks.iter().map(|b| b.iterations).sum::<usize>();
            Ok(result)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Coordinates {
    s: f64,
    rho: f64,
    n: usize,
    p: usize,
    replicate: usize,
    seed: u64,
}

fn failed(c: Coordinates, algorithm: Algorithm, lambda: f64, error: &SlogError) -> RunRecord {
    RunRecord {
        s: c.s,
        rho: c.rho,
        n: c.n,
        p: c.p,
        replicate: c.replicate,
        seed: c.seed,
        algorithm,
        lambda,
        iterations: 0,
        wall_time: Duration::from_nanos(1),
        dist_to_ref: f64::NAN,
        kkt_violation: f64::NAN,
        nonzeros: 0,
        converged: false,
        error: Some(error.to_string()),
    }
}

fn run_replicate(grid: &ExperimentGrid, c: Coordinates) -> Vec<RunRecord> {
    let spec = SimulationSpec {
        n: c.n,
        p: c.p,
        rho: c.rho,
        rule: grid.rule.clone(),
        snr: grid.snr,
        seed: c.seed,
    };
    let setup = generate(&spec).and_then(|data| {
        let target = SparsityTarget::new(c.s)?;
        let cal = calibrate_lambda(&data.problem, target)?;
        Ok((data.problem, cal.lambda, cal.target))
    });
    let (problem, lambda, target) = match setup {
        Ok(v) => v,
        Err(e) => return grid.algorithms.iter().map(|&a| failed(c, a, f64::NAN, &e)).collect(),
    };

    let mut oracles = Oracles {
        problem: &problem,
        tol: grid.configs.oracle_tol,
        lasso: None,
        enet: None,
        group: None,
    };
    grid.algorithms
        .iter()
        .map(|&algorithm| {
            let penalty = match penalty_for(algorithm, lambda, problem.p(), &grid.configs) {
                Ok(p) => p,
                Err(e) => return failed(c, algorithm, lambda, &e),
            };
            let oracle = match oracles.get(&penalty) {
                Ok(o) => o,
                Err(e) => return failed(c, algorithm, lambda, &e),
            };
            let outcome = run_algorithm(&problem, algorithm, lambda, target, &penalty, &oracle, &grid.configs, grid.mode);
            let result = match outcome {
                Ok(r) => r,
                Err(SlogError::NotConverged(partial)) => *partial,
                Err(e) => return failed(c, algorithm, lambda, &e),
            };
            let dist = relative_distance(result.coefficients.view(), oracle.view());
            let kkt = kkt_check(&problem, &penalty, result.coefficients.view(), f64::INFINITY)
                .map(|r| r.max_violation)
                .unwrap_or(f64::NAN);
            let mut converged = result.converged;
            if let ComparisonMode::MatchReference { bound } = grid.mode {
                converged &= dist <= bound;
            }
            if let Some(tol) = grid.certify_tol {
                converged &= kkt <= tol;
            }
            RunRecord {
                s: c.s,
                rho: c.rho,
                n: c.n,
                p: c.p,
                replicate: c.replicate,
                seed: c.seed,
                algorithm,
                lambda,
                iterations: result.iterations,
                wall_time: result.wall_time.max(Duration::from_nanos(1)),
                dist_to_ref: dist,
                kkt_violation: kkt,
                nonzeros: result.nonzeros(),
                converged,
                error: (!result.converged).then(|| "stopped without meeting its stopping rule".to_string()),
            }
        })
        .collect()
}

/// Runs every algorithm on every replicate of every cell.
///
/// Each replicate generates its own dataset (seed `grid.seed + index`),
/// calibrates the penalty to the cell's sparsity level and solves the oracle
/// before timing the algorithms. Failures are recorded, not returned.
pub fn run_grid(grid: &ExperimentGrid) -> Result<Vec<RunRecord>> {
    grid.validate()?;
    let mut tasks = Vec::new();
    for (i, (s, rho, n, p)) in grid.cells().into_iter().enumerate() {
        for replicate in 0..grid.replicates {
            let seed = grid.seed.wrapping_add((i * grid.replicates + replicate) as u64);
            tasks.push(Coordinates { s, rho, n, p, replicate, seed });
        }
    }
    let records: Vec<Vec<RunRecord>> = if grid.jobs == 1 {
        tasks.iter().map(|&c| run_replicate(grid, c)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(grid.jobs)
            .build()
            .map_err(|e| SlogError::InvalidConfig(e.to_string()))?;
        pool.install(|| tasks.par_iter().map(|&c| run_replicate(grid, c)).collect())
    };
    Ok(records.into_iter().flatten().collect())
}
