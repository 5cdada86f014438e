use std::time::Instant;

use ndarray::Array1;

use super::config::{start_vector, SolverConfig};
use super::update::{weighted_step, LassoRule, WeightRule};
use crate::error::{Result, SlogError};
use crate::problem::RegressionProblem;
use crate::trace::{keep_snapshot, relative_step, SolverResult, StopReason, TraceRecord};

/// Runs a weighted recursion from `start` until one of the stopping rules fires.
///
/// Order per iteration: update, prune, then test (all zero, reference
/// distance, relative step, iteration cap).
pub(crate) fn run_recursion<R: WeightRule>(
    problem: &RegressionProblem,
    config: &SolverConfig,
    lambda: f64,
    start: Array1<f64>,
    rule: &mut R,
) -> Result<SolverResult> {
    let clock = Instant::now();
    let mut b = start;
    let initial_objective = rule.objective(problem, &b);
    let mut trace = Vec::new();
    let mut snapshots = config.retain_snapshots.then(Vec::new);

    let finish = |b: Array1<f64>, trace: Vec<TraceRecord>, snapshots, reason: StopReason| SolverResult {
        coefficients: b,
        iterations: trace.len(),
        converged: reason != StopReason::MaxIterations,
        stop_reason: reason,
        trace,
        initial_objective,
        wall_time: clock.elapsed(),
        snapshots,
    };

    if b.iter().all(|v| *v == 0.0) {
        return Ok(finish(b, trace, snapshots, StopReason::ZeroFixedPoint));
    }

    for k in 1..=config.max_iter {
        let mut next = weighted_step(problem, rule, &b, config.inversion)?;
        rule.prune(&mut next);
        let step = relative_step(b.view(), next.view());
        let dist = config.reference.as_ref().map(|r| r.distance(next.view()));
        trace.push(TraceRecord {
            iteration: k,
            objective: rule.objective(problem, &next),
            step,
            active: next.iter().filter(|v| **v != 0.0).count(),
            dist_to_ref: dist,
            lambda,
        });
        if let Some(s) = snapshots.as_mut() {
            if keep_snapshot(k) {
                s.push((k, next.clone()));
            }
        }
        b = next;

        let reached = matches!((&config.reference, dist), (Some(r), Some(d)) if r.reached(d));
        let reason = if b.iter().all(|v| *v == 0.0) {
            Some(StopReason::ZeroFixedPoint)
        } else if reached {
            Some(StopReason::ReferenceReached)
        } else if step < config.step_tol {
            Some(StopReason::StepTolerance)
        } else {
            None
        };
        if let Some(reason) = reason {
            return Ok(finish(b, trace, snapshots, reason));
        }
    }
    Err(SlogError::NotConverged(Box::new(finish(b, trace, snapshots, StopReason::MaxIterations))))
}

/// Lasso via the SLOG recursion (rSLOG when `config.threshold > 0`).
pub fn solve_slog(problem: &RegressionProblem, lambda: f64, config: &SolverConfig) -> Result<SolverResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(SlogError::InvalidPenalty(format!("lambda must be > 0, got {lambda}")));
    }
    config.validate(problem.p())?;
    let start = start_vector(problem, lambda, &config.start);
    let mut rule = LassoRule {
        lambda,
        threshold: config.threshold,
    };
    run_recursion(problem, config, lambda, start, &mut rule)
}
