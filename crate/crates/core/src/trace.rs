//! Per-iteration records and solver results shared by every algorithm.

use std::time::Duration;

use ndarray::{Array1, ArrayView1};

/// Relative change `||b_k - b_{k-1}|| / ||b_{k-1}||`, falling back to the
/// absolute norm when the previous iterate is (numerically) zero.
pub fn relative_step(prev: ArrayView1<f64>, next: ArrayView1<f64>) -> f64 {
    let mut diff = 0.0;
    let mut base = 0.0;
    for (a, b) in prev.iter().zip(next.iter()) {
        diff += (b - a) * (b - a);
        base += a * a;
    }
    let base = base.sqrt();
    if base < 1e-300 {
        diff.sqrt()
    } else {
        diff.sqrt() / base
    }
}

/// Relative l2 distance `||a - b|| / ||b||`, absolute when `b` is zero.
pub fn relative_distance(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    relative_step(b, a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    /// 1-based iteration (or sweep) index.
    pub iteration: usize,
    pub objective: f64,
    pub step: f64,
    pub active: usize,
    pub dist_to_ref: Option<f64>,
    /// Penalty in force during this iteration; only varies along CD paths.
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    StepTolerance,
    ReferenceReached,
    /// Every coefficient is exactly zero, so the iteration cannot move again.
    ZeroFixedPoint,
    MaxIterations,
}

/// A target solution plus the distance at which a run counts as matched.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub coefficients: Array1<f64>,
    /// When set, the run stops as soon as its relative distance to
    /// `coefficients` drops to this value.
    pub stop_distance: Option<f64>,
}

impl Reference {
    pub fn new(coefficients: Array1<f64>) -> Self {
        Self {
            coefficients,
            stop_distance: None,
        }
    }

    pub fn stopping_at(coefficients: Array1<f64>, distance: f64) -> Self {
        Self {
            coefficients,
            stop_distance: Some(distance),
        }
    }

    pub fn distance(&self, b: ArrayView1<f64>) -> f64 {
        relative_distance(b, self.coefficients.view())
    }

    pub(crate) fn reached(&self, d: f64) -> bool {
        self.stop_distance.is_some_and(|t| d <= t)
    }
}

/// Which iterates to keep when snapshots are requested.
pub fn keep_snapshot(iteration: usize) -> bool {
    iteration <= 1000 || iteration.is_multiple_of(100)
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub coefficients: Array1<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub trace: Vec<TraceRecord>,
    /// Objective at the starting vector, so the first step can be checked too.
    pub initial_objective: f64,
    pub wall_time: Duration,
    /// `(iteration, iterate)` pairs, present only when retention was requested.
    pub snapshots: Option<Vec<(usize, Array1<f64>)>>,
}

impl SolverResult {
    pub fn nonzeros(&self) -> usize {
        self.coefficients.iter().filter(|v| **v != 0.0).count()
    }

    /// Objective sequence including the starting point.
    pub fn objectives(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.initial_objective).chain(self.trace.iter().map(|r| r.objective))
    }

    /// Largest increase of the objective between consecutive entries of the
    /// trace. Nonpositive means monotone.
    pub fn worst_objective_increase(&self) -> f64 {
        let objs: Vec<f64> = self.objectives().collect();
        objs.windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}
