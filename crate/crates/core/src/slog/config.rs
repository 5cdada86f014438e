use ndarray::Array1;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SlogError};
use crate::penalty::sign;
use crate::problem::RegressionProblem;
use crate::trace::Reference;

#[derive(Debug, Clone, PartialEq)]
pub enum StartStrategy {
    /// `sign(X^T y) * lambda / p`.
    Uninformed,
    Constant(f64),
    Random { lower: f64, upper: f64, seed: u64 },
    Explicit(Array1<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Inversion {
    /// Naive when the active set is no larger than `n`, Woodbury otherwise.
    #[default]
    Auto,
    Naive,
    Woodbury,
    Miller,
}

impl Inversion {
    pub fn resolve(self, n: usize, active: usize) -> Self {
        match self {
            Self::Auto if active <= n => Self::Naive,
            Self::Auto => Self::Woodbury,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub start: StartStrategy,
    pub step_tol: f64,
    pub max_iter: usize,
    /// Coefficients with `|b_j| <= threshold` are zeroed after each update.
    /// Zero gives plain SLOG.
    pub threshold: f64,
    pub inversion: Inversion,
    pub reference: Option<Reference>,
    pub retain_snapshots: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            start: StartStrategy::Uninformed,
            step_tol: 1e-3,
            max_iter: 1_000_000,
            threshold: 1e-13,
            inversion: Inversion::Auto,
            reference: None,
            retain_snapshots: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, p: usize) -> Result<()> {
        if !(self.step_tol > 0.0) {
            return Err(SlogError::InvalidConfig(format!("step_tol must be > 0, got {}", self.step_tol)));
        }
        if !(self.threshold >= 0.0) || !self.threshold.is_finite() {
            return Err(SlogError::InvalidConfig(format!("threshold must be >= 0, got {}", self.threshold)));
        }
        if self.max_iter == 0 {
            return Err(SlogError::InvalidConfig("max_iter must be >= 1".into()));
        }
        match &self.start {
            StartStrategy::Explicit(v) if v.len() != p => {
                return Err(SlogError::DimensionMismatch(format!(
                    "explicit start has length {}, expected {p}",
                    v.len()
                )))
            }
            StartStrategy::Explicit(v) if v.iter().any(|x| !x.is_finite()) => {
                return Err(SlogError::InvalidConfig("explicit start is not finite".into()))
            }
            StartStrategy::Random { lower, upper, .. } if !(lower <= upper) || !lower.is_finite() || !upper.is_finite() => {
                return Err(SlogError::InvalidConfig(format!("bad random start range [{lower}, {upper}]")))
            }
            StartStrategy::Constant(v) if !v.is_finite() => {
                return Err(SlogError::InvalidConfig("constant start is not finite".into()))
            }
            _ => {}
        }
        if let Some(r) = &self.reference {
            if r.coefficients.len() != p {
                return Err(SlogError::DimensionMismatch("reference length differs from p".into()));
            }
        }
        Ok(())
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_step_tol(mut self, step_tol: f64) -> Self {
        self.step_tol = step_tol;
        self
    }

    pub fn with_start(mut self, start: StartStrategy) -> Self {
        self.start = start;
        self
    }

    pub fn with_inversion(mut self, inversion: Inversion) -> Self {
        self.inversion = inversion;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_reference(mut self, reference: Reference) -> Self {
        self.reference = Some(reference);
        self
    }
}

/// Builds the starting vector. `scale` is the penalty strength the uninformed
/// start is proportional to.
pub fn start_vector(problem: &RegressionProblem, scale: f64, start: &StartStrategy) -> Array1<f64> {
    let p = problem.p();
    match start {
        StartStrategy::Uninformed => {
            let base = scale / p as f64;
            // A zero entry would pin the coordinate at zero forever, so nudge it.
            problem
                .xty()
                .mapv(|g| if g == 0.0 { base * 1e-3 } else { sign(g) * base })
        }
        StartStrategy::Constant(v) => Array1::from_elem(p, *v),
        StartStrategy::Random { lower, upper, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            if lower == upper {
                Array1::from_elem(p, *lower)
            } else {
                (0..p).map(|_| rng.random_range(*lower..*upper)).collect()
            }
        }
        StartStrategy::Explicit(v) => v.clone(),
    }
}
