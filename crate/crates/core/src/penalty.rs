//! Penalty definitions and the penalized least-squares objective.
//!
//! Objectives are in minimized form, e.g. `||y - Xb||^2 + 2 lambda ||b||_1` for
//! the lasso.

use ndarray::{Array1, ArrayView1};

use crate::error::{Result, SlogError};
use crate::problem::RegressionProblem;

/// Sign with `sign(0) = 0`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `sth(a, c) = (a - c sign a) I(|a| > c)`.
#[inline]
pub fn soft_threshold(a: f64, c: f64) -> f64 {
    debug_assert!(c >= 0.0);
    if a > c {
        a - c
    } else if a < -c {
        a + c
    } else {
        0.0
    }
}

/// A partition of `0..p` into nonempty groups.
#[derive(Debug, Clone, PartialEq)]
pub struct Groups {
    members: Vec<Vec<usize>>,
    group_of: Vec<usize>,
}

impl Groups {
    pub fn new(members: Vec<Vec<usize>>, p: usize) -> Result<Self> {
        let mut group_of = vec![usize::MAX; p];
        for (m, group) in members.iter().enumerate() {
            if group.is_empty() {
                return Err(SlogError::InvalidPenalty(format!("group {m} is empty")));
            }
            for &j in group {
                if j >= p {
                    return Err(SlogError::InvalidPenalty(format!("index {j} out of range for p = {p}")));
                }
                if group_of[j] != usize::MAX {
                    return Err(SlogError::InvalidPenalty(format!("index {j} appears in two groups")));
                }
                group_of[j] = m;
            }
        }
        if let Some(j) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(SlogError::InvalidPenalty(format!("index {j} is in no group")));
        }
        Ok(Self { members, group_of })
    }

    pub fn singletons(p: usize) -> Self {
        Self {
            members: (0..p).map(|j| vec![j]).collect(),
            group_of: (0..p).collect(),
        }
    }

    /// Consecutive groups of the given sizes.
    pub fn contiguous(sizes: &[usize]) -> Result<Self> {
        let mut members = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &s in sizes {
            members.push((start..start + s).collect());
            start += s;
        }
        Self::new(members, start)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn p(&self) -> usize {
        self.group_of.len()
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn group_of(&self, j: usize) -> usize {
        self.group_of[j]
    }

    pub fn norms(&self, b: ArrayView1<f64>) -> Array1<f64> {
        self.members
            .iter()
            .map(|g| g.iter().map(|&j| b[j] * b[j]).sum::<f64>().sqrt())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PenaltySpec {
    Lasso { lambda: f64 },
    ElasticNet { lambda1: f64, lambda2: f64 },
    GroupLasso { lambda: f64, groups: Groups },
}

impl PenaltySpec {
    pub fn lasso(lambda: f64) -> Self {
        Self::Lasso { lambda }
    }

    /// The coefficient on the (group) l1 part.
    pub fn l1_strength(&self) -> f64 {
        match self {
            Self::Lasso { lambda } | Self::GroupLasso { lambda, .. } => *lambda,
            Self::ElasticNet { lambda1, .. } => *lambda1,
        }
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SlogError::InvalidPenalty(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        match self {
            Self::Lasso { lambda } => positive("lambda", *lambda),
            Self::ElasticNet { lambda1, lambda2 } => {
                positive("lambda1", *lambda1)?;
                if !(lambda2.is_finite() && *lambda2 >= 0.0) {
                    return Err(SlogError::InvalidPenalty(format!("lambda2 must be >= 0, got {lambda2}")));
                }
                Ok(())
            }
            Self::GroupLasso { lambda, groups } => {
                positive("lambda", *lambda)?;
                if groups.p() != p {
                    return Err(SlogError::InvalidPenalty(format!(
                        "groups cover {} columns, design has {p}",
                        groups.p()
                    )));
                }
                Ok(())
            }
        }
    }

    /// Penalty term alone, in the same units as the residual sum of squares.
    pub fn penalty_value(&self, b: ArrayView1<f64>) -> f64 {
        match self {
            Self::Lasso { lambda } => 2.0 * lambda * b.iter().map(|v| v.abs()).sum::<f64>(),
            Self::ElasticNet { lambda1, lambda2 } => {
                let l1: f64 = b.iter().map(|v| v.abs()).sum();
                let l2: f64 = b.iter().map(|v| v * v).sum();
                2.0 * lambda1 * l1 + lambda2 * l2
            }
            Self::GroupLasso { lambda, groups } => 2.0 * lambda * groups.norms(b).sum(),
        }
    }
}

pub(crate) fn check_len(problem: &RegressionProblem, b: ArrayView1<f64>) -> Result<()> {
    if b.len() != problem.p() {
        return Err(SlogError::DimensionMismatch(format!(
            "coefficient vector has length {}, expected {}",
            b.len(),
            problem.p()
        )));
    }
    Ok(())
}

pub(crate) fn rss(problem: &RegressionProblem, b: ArrayView1<f64>) -> f64 {
    problem.residual(b).iter().map(|r| r * r).sum()
}

/// Penalized residual sum of squares.
pub fn objective(problem: &RegressionProblem, penalty: &PenaltySpec, b: ArrayView1<f64>) -> Result<f64> {
    check_len(problem, b)?;
    penalty.validate(problem.p())?;
    Ok(rss(problem, b) + penalty.penalty_value(b))
}

/// Lasso objective without validation; used on hot paths that already checked their inputs.
pub(crate) fn lasso_objective(problem: &RegressionProblem, lambda: f64, b: ArrayView1<f64>) -> f64 {
    rss(problem, b) + 2.0 * lambda * b.iter().map(|v| v.abs()).sum::<f64>()
}
