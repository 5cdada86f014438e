//! Iteratively reweighted least squares with a shrinking smoothing parameter.
//!
//! Each step solves `(X^T X + diag(lambda / sqrt(eps_k^2 + b_j^2))) b = X^T y`,
//! with `eps_k = min(eps_{k-1}, alpha * r_{h+1}(b_k))` and `r_{h+1}` the
//! `(h+1)`-th largest coefficient magnitude. At `eps = 0` this is exactly the
//! SLOG update.

use ndarray::Array1;

use crate::error::{Result, SlogError};
use crate::penalty::lasso_objective;
use crate::problem::RegressionProblem;
use crate::slog::{run_recursion, start_vector, SolverConfig, WeightRule};
use crate::trace::SolverResult;

#[derive(Debug, Clone, PartialEq)]
pub struct LaiConfig {
    pub alpha: f64,
    /// Zero-based rank `h` in `r_{h+1}`; must be below `p`.
    pub h: usize,
    pub eps0: f64,
    /// Pin `eps` at zero, turning every step into a SLOG step.
    pub force_zero_eps: bool,
    /// Start, tolerances and inversion; the threshold field is ignored.
    pub solver: SolverConfig,
}

impl LaiConfig {
    pub fn new(alpha: f64, h: usize) -> Self {
        Self {
            alpha,
            h,
            eps0: 1.0,
            force_zero_eps: false,
            solver: SolverConfig::default(),
        }
    }
}

/// `min(prev, alpha * r_{h+1}(b))`.
pub fn lai_epsilon(prev: f64, alpha: f64, h: usize, b: &Array1<f64>) -> f64 {
    let mut mags: Vec<f64> = b.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, c| c.total_cmp(a));
    prev.min(alpha * mags[h])
}

struct LaiRule {
    lambda: f64,
    alpha: f64,
    h: usize,
    eps: f64,
    force_zero: bool,
}

impl WeightRule for LaiRule {
    fn weights(&mut self, b: &Array1<f64>, active: &mut Vec<usize>, weights: &mut Vec<f64>) {
        self.eps = if self.force_zero {
            0.0
        } else {
            lai_epsilon(self.eps, self.alpha, self.h, b)
        };
        for (j, &v) in b.iter().enumerate() {
            // hypot(0, v) is exactly |v|, so eps = 0 reproduces the SLOG weights.
            let w = self.eps.hypot(v) / self.lambda;
            if w > 0.0 {
                active.push(j);
                weights.push(w);
            }
        }
    }

    fn objective(&self, problem: &RegressionProblem, b: &Array1<f64>) -> f64 {
        lasso_objective(problem, self.lambda, b.view())
    }
}

pub fn solve_lai_irls(problem: &RegressionProblem, lambda: f64, config: &LaiConfig) -> Result<SolverResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(SlogError::InvalidPenalty(format!("lambda must be > 0, got {lambda}")));
    }
    if !(config.alpha > 0.0) {
        return Err(SlogError::InvalidConfig("alpha must be > 0".into()));
    }
    if config.h >= problem.p() {
        return Err(SlogError::InvalidConfig(format!("h = {} must be below p = {}", config.h, problem.p())));
    }
    if !(config.eps0 > 0.0) && !config.force_zero_eps {
        return Err(SlogError::InvalidConfig("eps0 must be > 0".into()));
    }
    config.solver.validate(problem.p())?;
    let start = start_vector(problem, lambda, &config.solver.start);
    let mut rule = LaiRule {
        lambda,
        alpha: config.alpha,
        h: config.h,
        eps: config.eps0,
        force_zero: config.force_zero_eps,
    };
    run_recursion(problem, &config.solver, lambda, start, &mut rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn epsilon_rule_on_crafted_iterate() {
        let b = array![0.5, -3.0, 0.1, 2.0];
        // Magnitudes sorted: 3, 2, 0.5, 0.1.
        assert_eq!(lai_epsilon(1.0, 1.0, 1, &b), 1.0);
        assert_eq!(lai_epsilon(1.0, 1.0, 2, &b), 0.5);
        // h = p - 1 with large alpha keeps eps at its previous value.
        assert_eq!(lai_epsilon(1.0, 1e6, 3, &b), 1.0);
        assert_eq!(lai_epsilon(1.0, 5.0, 3, &b), 0.5);
    }
}
