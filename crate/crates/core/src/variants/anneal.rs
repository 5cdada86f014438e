//! Annealed SLOG: the diagonal weights are inverse-Gaussian draws whose
//! spread shrinks with a geometric schedule.

use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SlogError};
use crate::penalty::lasso_objective;
use crate::problem::RegressionProblem;
use crate::slog::{run_recursion, start_vector, SolverConfig, WeightRule};
use crate::trace::SolverResult;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub sigma2_init: f64,
    /// Multiplier applied to `sigma2` after every iteration.
    pub decay: f64,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self {
            sigma2_init: 1e-7,
            decay: 0.99,
            seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn sigma2(&self, k: usize) -> f64 {
        self.sigma2_init * self.decay.powi(k as i32)
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma2_init >= 0.0) || !self.sigma2_init.is_finite() {
            return Err(SlogError::InvalidConfig("sigma2_init must be >= 0".into()));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(SlogError::InvalidConfig("decay must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Draws from the inverse Gaussian with mean `mu` and shape `shape`
/// (Michael, Schucany and Haas transformation with one uniform accept/flip).
pub fn sample_inverse_gaussian<R: Rng>(rng: &mut R, mu: f64, shape: f64) -> f64 {
    let nu: f64 = rng.sample(StandardNormal);
    let y = mu * nu * nu;
    // mu + mu y/(2 shape) - mu/(2 shape) sqrt(4 mu shape y/mu + y^2), rearranged to
    // avoid cancelling two nearly equal terms when the shape is large.
    let x = mu - 2.0 * mu * y / (y + (4.0 * shape * y + y * y).sqrt());
    let u: f64 = rng.random();
    if u <= mu / (mu + x) {
        x
    } else {
        mu * mu / x
    }
}

struct AnnealRule {
    lambda: f64,
    threshold: f64,
    schedule: AnnealSchedule,
    k: usize,
    rng: ChaCha8Rng,
}

impl WeightRule for AnnealRule {
    fn weights(&mut self, b: &Array1<f64>, active: &mut Vec<usize>, weights: &mut Vec<f64>) {
        let sigma2 = self.schedule.sigma2(self.k);
        self.k += 1;
        let shape = 1.0 / sigma2;
        for (j, &v) in b.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let w = if sigma2 == 0.0 || !shape.is_finite() {
                // Degenerate draw: U = 1/|b|, so the weight is the SLOG weight.
                v.abs() / self.lambda
            } else {
                let u = sample_inverse_gaussian(&mut self.rng, 1.0 / v.abs(), shape);
                1.0 / (self.lambda * u)
            };
            if w > 0.0 && w.is_finite() {
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

/// `b <- (X^T X + lambda U)^{-1} X^T y` with `U_j ~ IG(1/|b_j|, 1/sigma2_k)`.
pub fn solve_aslog(problem: &RegressionProblem, lambda: f64, schedule: &AnnealSchedule, config: &SolverConfig) -> Result<SolverResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(SlogError::InvalidPenalty(format!("lambda must be > 0, got {lambda}")));
    }
    schedule.validate()?;
    config.validate(problem.p())?;
    let start = start_vector(problem, lambda, &config.start);
    let mut rule = AnnealRule {
        lambda,
        threshold: config.threshold,
        schedule: *schedule,
        k: 0,
        rng: ChaCha8Rng::seed_from_u64(schedule.seed),
    };
    run_recursion(problem, config, lambda, start, &mut rule)
}
