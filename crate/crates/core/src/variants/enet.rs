use ndarray::Array1;

use crate::error::{Result, SlogError};
use crate::penalty::rss;
use crate::problem::RegressionProblem;
use crate::slog::{run_recursion, start_vector, SolverConfig, WeightRule};
use crate::trace::SolverResult;

/// `(X^T X + lambda2 I + lambda1 B^{-1}) b = X^T y`, i.e. weights
/// `|b_j| / (lambda1 + lambda2 |b_j|)`.
struct EnetRule {
    lambda1: f64,
    lambda2: f64,
    threshold: f64,
}

impl WeightRule for EnetRule {
    fn weights(&mut self, b: &Array1<f64>, active: &mut Vec<usize>, weights: &mut Vec<f64>) {
        for (j, &v) in b.iter().enumerate() {
            let a = v.abs();
            let w = a / (self.lambda1 + self.lambda2 * a);
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
        let l1: f64 = b.iter().map(|v| v.abs()).sum();
        let l2: f64 = b.iter().map(|v| v * v).sum();
        rss(problem, b.view()) + 2.0 * self.lambda1 * l1 + self.lambda2 * l2
    }
}

/// Elastic net `||y - Xb||^2 + 2 lambda1 ||b||_1 + lambda2 ||b||^2` via the
/// SLOG-type recursion.
pub fn solve_enet_slog(problem: &RegressionProblem, lambda1: f64, lambda2: f64, config: &SolverConfig) -> Result<SolverResult> {
    if !(lambda1 > 0.0) || !lambda1.is_finite() {
        return Err(SlogError::InvalidPenalty(format!("lambda1 must be > 0, got {lambda1}")));
    }
    if !(lambda2 >= 0.0) || !lambda2.is_finite() {
        return Err(SlogError::InvalidPenalty(format!("lambda2 must be >= 0, got {lambda2}")));
    }
    config.validate(problem.p())?;
    let start = start_vector(problem, lambda1, &config.start);
    let mut rule = EnetRule {
        lambda1,
        lambda2,
        threshold: config.threshold,
    };
    run_recursion(problem, config, lambda1, start, &mut rule)
}
