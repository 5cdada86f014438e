use ndarray::Array1;

use super::config::Inversion;
use super::system::solve_weighted;
use crate::error::{Result, SlogError};
use crate::penalty::lasso_objective;
use crate::problem::RegressionProblem;

/// One weighted-ridge recursion: which coordinates are live, what weight
/// each carries, how small values are pruned, and what objective is tracked.
pub(crate) trait WeightRule {
    /// Fills `active` (ascending) and matching positive `weights` for iterate `b`.
    fn weights(&mut self, b: &Array1<f64>, active: &mut Vec<usize>, weights: &mut Vec<f64>);

    /// Zeroes coefficients that fell below the pruning threshold.
    fn prune(&self, _b: &mut Array1<f64>) {}

    fn objective(&self, problem: &RegressionProblem, b: &Array1<f64>) -> f64;
}

/// Lasso weights `|b_j| / lambda`, with per-coordinate thresholding.
pub(crate) struct LassoRule {
    pub lambda: f64,
    pub threshold: f64,
}

impl WeightRule for LassoRule {
    fn weights(&mut self, b: &Array1<f64>, active: &mut Vec<usize>, weights: &mut Vec<f64>) {
        for (j, &v) in b.iter().enumerate() {
            let w = v.abs() / self.lambda;
            if w > 0.0 {
                active.push(j);
                weights.push(w);
            }
        }
    }

    fn prune(&self, b: &mut Array1<f64>) {
        if self.threshold > 0.0 {
            let t = self.threshold;
            b.mapv_inplace(|v| if v.abs() <= t { 0.0 } else { v });
        }
    }

    fn objective(&self, problem: &RegressionProblem, b: &Array1<f64>) -> f64 {
        lasso_objective(problem, self.lambda, b.view())
    }
}

/// Applies one unpruned recursion step. Coordinates outside the rule's active
/// set come back exactly zero.
pub(crate) fn weighted_step<R: WeightRule>(
    problem: &RegressionProblem,
    rule: &mut R,
    b: &Array1<f64>,
    inversion: Inversion,
) -> Result<Array1<f64>> {
    let mut active = Vec::new();
    let mut weights = Vec::new();
    rule.weights(b, &mut active, &mut weights);
    let sol = solve_weighted(problem, &active, &weights, inversion)?;
    let mut next = Array1::zeros(problem.p());
    for (&j, v) in active.iter().zip(sol.iter()) {
        next[j] = *v;
    }
    Ok(next)
}

/// Current iterate and its nonzero pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct SlogState {
    pub b: Array1<f64>,
    pub active: Vec<usize>,
    pub k: usize,
}

impl SlogState {
    pub fn new(b: Array1<f64>) -> Self {
        let active = nonzero_pattern(&b);
        Self { b, active, k: 0 }
    }
}

pub(crate) fn nonzero_pattern(b: &Array1<f64>) -> Vec<usize> {
    b.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, _)| j).collect()
}

/// `b <- [X*^T X* + lambda B*^{-1}]^{-1} X*^T y` on the nonzero coordinates of `b`.
pub fn slog_update(problem: &RegressionProblem, lambda: f64, state: &SlogState, inversion: Inversion) -> Result<SlogState> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(SlogError::InvalidPenalty(format!("lambda must be > 0, got {lambda}")));
    }
    if state.b.len() != problem.p() {
        return Err(SlogError::DimensionMismatch("state length differs from p".into()));
    }
    let mut rule = LassoRule { lambda, threshold: 0.0 };
    let b = weighted_step(problem, &mut rule, &state.b, inversion)?;
    let active = nonzero_pattern(&b);
    Ok(SlogState { b, active, k: state.k + 1 })
}
