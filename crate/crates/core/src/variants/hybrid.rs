//! Block-wise solving: independent fits per column block, combined exactly
//! when blocks are orthogonal and refined by a full rSLOG pass otherwise.

use ndarray::Array1;
use rayon::prelude::*;

use crate::baselines::cd::{solve_cd, CdConfig};
use crate::error::{Result, SlogError};
use crate::penalty::sign;
use crate::problem::RegressionProblem;
use crate::slog::{solve_slog, SolverConfig, StartStrategy};
use crate::trace::{SolverResult, StopReason};

/// Cross-block Gram entries at or below this are treated as exact zeros.
pub const ORTHOGONALITY_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockSolver {
    Slog,
    Cd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub blocks: Vec<Vec<usize>>,
    pub solvers: Vec<BlockSolver>,
    /// Step tolerance for the block fits; `None` uses the full solve's.
    pub block_step_tol: Option<f64>,
}

impl BlockPartition {
    pub fn new(blocks: Vec<Vec<usize>>, solvers: Vec<BlockSolver>) -> Self {
        Self {
            blocks,
            solvers,
            block_step_tol: None,
        }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.blocks.len() != self.solvers.len() {
            return Err(SlogError::InvalidConfig("one solver per block is required".into()));
        }
        let mut seen = vec![false; p];
        for block in &self.blocks {
            if block.is_empty() {
                return Err(SlogError::InvalidConfig("empty block".into()));
            }
            for &j in block {
                if j >= p || seen[j] {
                    return Err(SlogError::InvalidConfig(format!("column {j} is out of range or repeated")));
                }
                seen[j] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(SlogError::InvalidConfig("blocks do not cover every column".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HybridOutcome {
    /// Combined fit. For orthogonal blocks it is the concatenation and carries
    /// no trace of its own.
    pub result: SolverResult,
    pub blocks: Vec<SolverResult>,
    pub orthogonal: bool,
}

/// Largest `|x_i^T x_j|` over column pairs in different blocks.
pub fn cross_block_coupling(problem: &RegressionProblem, partition: &BlockPartition) -> f64 {
    let gram = problem.gram();
    let mut block_of = vec![0usize; problem.p()];
    for (b, idx) in partition.blocks.iter().enumerate() {
        for &j in idx {
            block_of[j] = b;
        }
    }
    let mut worst = 0.0f64;
    for i in 0..problem.p() {
        for j in i + 1..problem.p() {
            if block_of[i] != block_of[j] {
                worst = worst.max(gram[[i, j]].abs());
            }
        }
    }
    worst
}

fn unwrap_block(r: Result<SolverResult>) -> Result<SolverResult> {
    match r {
        Err(SlogError::NotConverged(partial)) => Ok(*partial),
        other => other,
    }
}

pub fn solve_hybrid(problem: &RegressionProblem, lambda: f64, partition: &BlockPartition, config: &SolverConfig) -> Result<HybridOutcome> {
    partition.validate(problem.p())?;
    config.validate(problem.p())?;
    let _ = problem.gram();

    let blocks: Vec<SolverResult> = partition
        .blocks
        .par_iter()
        .zip(partition.solvers.par_iter())
        .map(|(idx, solver)| {
            let sub = problem.restrict_columns(idx);
            let mut cfg = config.clone();
            cfg.reference = None;
            if let Some(tol) = partition.block_step_tol {
                cfg.step_tol = tol;
            }
            if let StartStrategy::Explicit(v) = &config.start {
                cfg.start = StartStrategy::Explicit(idx.iter().map(|&j| v[j]).collect());
            }
            match solver {
                BlockSolver::Slog => unwrap_block(solve_slog(&sub, lambda, &cfg)),
                BlockSolver::Cd => unwrap_block(solve_cd(&sub, lambda, &CdConfig::default(), None)),
            }
        })
        .collect::<Result<_>>()?;

    let mut combined = Array1::zeros(problem.p());
    for (idx, res) in partition.blocks.iter().zip(&blocks) {
        for (&j, v) in idx.iter().zip(res.coefficients.iter()) {
            combined[j] = *v;
        }
    }

    if cross_block_coupling(problem, partition) <= ORTHOGONALITY_CUTOFF {
        let converged = blocks.iter().all(|b| b.converged);
        let result = SolverResult {
            coefficients: combined,
            iterations: 0,
            converged,
            stop_reason: if converged { StopReason::StepTolerance } else { StopReason::MaxIterations },
            trace: Vec::new(),
            initial_objective: f64::NAN,
            wall_time: blocks.iter().map(|b| b.wall_time).sum(),
            snapshots: None,
        };
        return Ok(HybridOutcome {
            result,
            blocks,
            orthogonal: true,
        });
    }

    // Zeros would stay zero forever under the full recursion, so give them a
    // small value pointing along the residual correlation.
    let g = problem.design().t().dot(&problem.residual(combined.view()));
    let restart = (config.threshold * 1e3).max(1e-6);
    for j in 0..problem.p() {
        if combined[j] == 0.0 {
            let s = sign(g[j]);
            combined[j] = if s == 0.0 { restart } else { s * restart };
        }
    }
    let full = config.clone().with_start(StartStrategy::Explicit(combined));
    let result = solve_slog(problem, lambda, &full)?;
    Ok(HybridOutcome {
        result,
        blocks,
        orthogonal: false,
    })
}
