//! Subgradient optimality diagnostics.

use ndarray::{Array1, ArrayView1};

use crate::error::Result;
use crate::penalty::{check_len, sign, PenaltySpec};
use crate::problem::RegressionProblem;

pub const DEFAULT_KKT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    /// One entry per coordinate, or per group for the group lasso.
    pub residuals: Array1<f64>,
    pub max_violation: f64,
    /// Indices of the nonzero coefficients.
    pub active_set: Vec<usize>,
    pub tol: f64,
}

impl KktReport {
    pub fn is_optimal(&self) -> bool {
        self.max_violation <= self.tol
    }
}

/// Stationarity residuals of the (halved) objective at `b`.
///
/// With `g = X^T (y - Xb)`, a lasso coordinate contributes `|g_j - lambda sign b_j|`
/// when active and `max(0, |g_j| - lambda)` otherwise.
pub fn kkt_check(problem: &RegressionProblem, penalty: &PenaltySpec, b: ArrayView1<f64>, tol: f64) -> Result<KktReport> {
    check_len(problem, b)?;
    penalty.validate(problem.p())?;
    let g = problem.design().t().dot(&problem.residual(b));

    let residuals: Array1<f64> = match penalty {
        PenaltySpec::Lasso { lambda } => lasso_residuals(&g, b, *lambda, 0.0),
        PenaltySpec::ElasticNet { lambda1, lambda2 } => lasso_residuals(&g, b, *lambda1, *lambda2),
        PenaltySpec::GroupLasso { lambda, groups } => groups
            .members()
            .iter()
            .map(|idx| {
                let norm = idx.iter().map(|&j| b[j] * b[j]).sum::<f64>().sqrt();
                if norm > 0.0 {
                    idx.iter()
                        .map(|&j| {
                            let d = g[j] - lambda * b[j] / norm;
                            d * d
                        })
                        .sum::<f64>()
                        .sqrt()
                } else {
                    let gnorm = idx.iter().map(|&j| g[j] * g[j]).sum::<f64>().sqrt();
                    (gnorm - lambda).max(0.0)
                }
            })
            .collect(),
    };

    let max_violation = residuals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let active_set = b.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, _)| j).collect();
    Ok(KktReport {
        residuals,
        max_violation,
        active_set,
        tol,
    })
}

fn lasso_residuals(g: &Array1<f64>, b: ArrayView1<f64>, l1: f64, l2: f64) -> Array1<f64> {
    g.iter()
        .zip(b.iter())
        .map(|(&gj, &bj)| {
            if bj != 0.0 {
                (gj - l2 * bj - l1 * sign(bj)).abs()
            } else {
                (gj.abs() - l1).max(0.0)
            }
        })
        .collect()
}
