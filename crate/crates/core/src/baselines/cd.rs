//! Pathwise coordinate descent on the Gram matrix.

use std::time::Instant;

use ndarray::Array1;

use crate::error::{Result, SlogError};
use crate::penalty::{lasso_objective, soft_threshold};
use crate::problem::RegressionProblem;
use crate::trace::{keep_snapshot, relative_step, Reference, SolverResult, StopReason, TraceRecord};

/// `||X^T y||_inf`, the smallest penalty whose solution is all zero.
pub fn lambda_max(problem: &RegressionProblem) -> f64 {
    problem.xty().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// `len` log-spaced values from `lambda_max` down to `target` (just `[target]`
/// when the target is already at or above `lambda_max`).
pub fn lambda_path(lambda_max: f64, target: f64, len: usize) -> Vec<f64> {
    if target >= lambda_max || len < 2 {
        return vec![target];
    }
    let (hi, lo) = (lambda_max.ln(), target.ln());
    let mut path: Vec<f64> = (0..len)
        .map(|i| (hi + (lo - hi) * i as f64 / (len - 1) as f64).exp())
        .collect();
    path[0] = lambda_max;
    path[len - 1] = target;
    path
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdConfig {
    /// Explicit decreasing penalties ending at the target; `None` builds the
    /// default log-spaced path.
    pub lambda_sequence: Option<Vec<f64>>,
    pub path_length: usize,
    /// A penalty stage ends once `max_j G_jj (change in b_j)^2 <= objective_tol * ||y||^2`.
    pub objective_tol: f64,
    /// Overrides `objective_tol` for the final penalty only.
    pub final_objective_tol: Option<f64>,
    /// Cap on the total number of sweeps over the whole path.
    pub max_sweeps: usize,
    /// Sum partial residuals over the current nonzeros only.
    pub active_set_shortcut: bool,
    pub start: Option<Array1<f64>>,
    pub retain_snapshots: bool,
}

impl Default for CdConfig {
    fn default() -> Self {
        Self {
            lambda_sequence: None,
            path_length: 50,
            objective_tol: 1e-13,
            final_objective_tol: None,
            max_sweeps: 10_000_000,
            active_set_shortcut: true,
            start: None,
            retain_snapshots: false,
        }
    }
}

impl CdConfig {
    /// Runs at `lambda` only, with no warm-start path.
    pub fn single(lambda: f64) -> Self {
        Self {
            lambda_sequence: Some(vec![lambda]),
            ..Self::default()
        }
    }

    fn sequence(&self, problem: &RegressionProblem, lambda: f64) -> Result<Vec<f64>> {
        let seq = match &self.lambda_sequence {
            Some(s) => s.clone(),
            None => lambda_path(lambda_max(problem), lambda, self.path_length),
        };
        if seq.is_empty() || *seq.last().unwrap() != lambda {
            return Err(SlogError::InvalidConfig("lambda sequence must end at the target".into()));
        }
        if seq.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(SlogError::InvalidConfig("lambda sequence must be strictly decreasing".into()));
        }
        if seq.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(SlogError::InvalidPenalty("lambda values must be finite and > 0".into()));
        }
        Ok(seq)
    }
}

struct Sweeper<'a> {
    gram: &'a ndarray::Array2<f64>,
    xty: ndarray::ArrayView1<'a, f64>,
    /// Sorted indices of nonzero coefficients.
    active: Vec<usize>,
    shortcut: bool,
}

impl Sweeper<'_> {
    /// One ascending pass; returns `max_j G_jj (delta b_j)^2`.
    fn sweep(&mut self, b: &mut [f64], lambda: f64) -> f64 {
        let p = b.len();
        let g = self.gram.as_slice().expect("standard layout");
        let mut worst = 0.0f64;
        for j in 0..p {
            let row = &g[j * p..(j + 1) * p];
            let mut s = self.xty[j];
            if self.shortcut {
                for &k in &self.active {
                    if k != j {
                        s -= row[k] * b[k];
                    }
                }
            } else {
                for k in 0..p {
                    if k != j {
                        s -= row[k] * b[k];
                    }
                }
            }
            let new = soft_threshold(s, lambda) / row[j];
            let old = b[j];
            if new != old {
                let d = new - old;
                worst = worst.max(row[j] * d * d);
                if old == 0.0 {
                    if let Err(pos) = self.active.binary_search(&j) {
                        self.active.insert(pos, j);
                    }
                } else if new == 0.0 {
                    if let Ok(pos) = self.active.binary_search(&j) {
                        self.active.remove(pos);
                    }
                }
                b[j] = new;
            }
        }
        worst
    }
}

/// Coordinate descent for the lasso at `lambda`, warm-started along the
/// configured penalty sequence.
///
/// Each coordinate step is the exact minimizer
/// `b_j = soft(x_j^T y - sum_{k != j} G_jk b_k, lambda) / G_jj`. A reference
/// with a stop distance ends the final stage as soon as it is matched.
pub fn solve_cd(
    problem: &RegressionProblem,
    lambda: f64,
    config: &CdConfig,
    reference: Option<&Reference>,
) -> Result<SolverResult> {
    let p = problem.p();
    let seq = config.sequence(problem, lambda)?;
    let mut b = match &config.start {
        Some(s) if s.len() != p => return Err(SlogError::DimensionMismatch("start length differs from p".into())),
        Some(s) => s.clone(),
        None => Array1::zeros(p),
    };
    if let Some(r) = reference {
        if r.coefficients.len() != p {
            return Err(SlogError::DimensionMismatch("reference length differs from p".into()));
        }
    }

    let clock = Instant::now();
    let gram = problem.gram();
    let null_dev: f64 = problem.response().iter().map(|v| v * v).sum();
    let mut sweeper = Sweeper {
        gram,
        xty: problem.xty(),
        active: b.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, _)| j).collect(),
        shortcut: config.active_set_shortcut,
    };
    let initial_objective = lasso_objective(problem, seq[0], b.view());
    let mut trace = Vec::new();
    let mut snapshots = config.retain_snapshots.then(Vec::new);
    let mut sweeps = 0usize;
    let mut reason = StopReason::MaxIterations;

    'path: for (stage, &lam) in seq.iter().enumerate() {
        let last = stage + 1 == seq.len();
        let tol = if last {
            config.final_objective_tol.unwrap_or(config.objective_tol)
        } else {
            config.objective_tol
        };
        loop {
            if sweeps == config.max_sweeps {
                break 'path;
            }
            let prev = b.clone();
            let worst = sweeper.sweep(b.as_slice_mut().expect("contiguous"), lam);
            sweeps += 1;
            let dist = reference.filter(|_| last).map(|r| r.distance(b.view()));
            trace.push(TraceRecord {
                iteration: sweeps,
                objective: lasso_objective(problem, lam, b.view()),
                step: relative_step(prev.view(), b.view()),
                active: sweeper.active.len(),
                dist_to_ref: dist,
                lambda: lam,
            });
            if let Some(s) = snapshots.as_mut() {
                if keep_snapshot(sweeps) {
                    s.push((sweeps, b.clone()));
                }
            }
            if last {
                if let (Some(r), Some(d)) = (reference, dist) {
                    if r.reached(d) {
                        reason = StopReason::ReferenceReached;
                        break 'path;
                    }
                }
            }
            if worst <= tol * null_dev {
                if last {
                    reason = StopReason::StepTolerance;
                    break 'path;
                }
                break;
            }
        }
    }

    let result = SolverResult {
        coefficients: b,
        iterations: sweeps,
        converged: reason != StopReason::MaxIterations,
        stop_reason: reason,
        trace,
        initial_objective,
        wall_time: clock.elapsed(),
        snapshots,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(SlogError::NotConverged(Box::new(result)))
    }
}
