//! Solvers for the active linear system `(X*^T X* + diag(1/w)) b = X*^T y`.
//!
//! Every SLOG-type recursion reduces to this system with its own positive
//! weights `w`; for the lasso `w_j = |b_j| / lambda`.

use ndarray::{Array1, Array2, ArrayView1, Axis};

use super::config::Inversion;
use crate::error::{Result, SlogError};
use crate::linalg::factor_with_jitter;
use crate::problem::RegressionProblem;

/// Solves the weighted active system; the result is indexed like `active`.
pub fn solve_weighted(problem: &RegressionProblem, active: &[usize], weights: &[f64], strategy: Inversion) -> Result<Array1<f64>> {
    debug_assert_eq!(active.len(), weights.len());
    if active.is_empty() {
        return Ok(Array1::zeros(0));
    }
    if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
        return Err(SlogError::SingularSystem);
    }
    match strategy.resolve(problem.n(), active.len()) {
        Inversion::Naive | Inversion::Auto => naive(problem, active, weights),
        Inversion::Woodbury => woodbury(problem, active, weights),
        Inversion::Miller => miller(problem, active, weights),
    }
}

/// Solves `(X*^T X* + lambda B*^{-1}) b = X*^T y` for the diagonal `b_star > 0`.
pub fn invert_active_system(
    problem: &RegressionProblem,
    active: &[usize],
    b_star: ArrayView1<f64>,
    lambda: f64,
    strategy: Inversion,
) -> Result<Array1<f64>> {
    if b_star.len() != active.len() {
        return Err(SlogError::DimensionMismatch("B* and active set differ in size".into()));
    }
    let w: Vec<f64> = b_star.iter().map(|b| b / lambda).collect();
    solve_weighted(problem, active, &w, strategy)
}

// Symmetrically scaled form (I + S G S) z = S X^T y with S = W^{1/2}, b = S z.
// Tiny weights then leave a near-identity block instead of a huge diagonal.
fn naive(problem: &RegressionProblem, active: &[usize], weights: &[f64]) -> Result<Array1<f64>> {
    let gram = problem.gram();
    let xty = problem.xty();
    let m = active.len();
    let s: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut a = Array2::<f64>::zeros((m, m));
    for (r, &i) in active.iter().enumerate() {
        let gi = gram.row(i);
        for (c, &j) in active.iter().enumerate().take(r + 1) {
            let v = s[r] * gi[j] * s[c];
            a[[r, c]] = v;
            a[[c, r]] = v;
        }
        a[[r, r]] += 1.0;
    }
    let rhs: Array1<f64> = active.iter().zip(&s).map(|(&j, si)| si * xty[j]).collect();
    let z = factor_with_jitter(a)?.solve(&rhs);
    Ok(&z * &Array1::from(s))
}

// Push-through form b = W X*^T (I_n + X* W X*^T)^{-1} y, an n x n solve.
fn woodbury(problem: &RegressionProblem, active: &[usize], weights: &[f64]) -> Result<Array1<f64>> {
    let s: Array1<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut xs = problem.design().select(Axis(1), active);
    xs *= &s;
    let mut k = xs.dot(&xs.t());
    k.diag_mut().mapv_inplace(|v| v + 1.0);
    let u = factor_with_jitter(k)?.solve(&problem.response().to_owned());
    Ok(xs.t().dot(&u) * &s)
}

// Rank-one recursion: start from diag(w) = (diag(1/w))^{-1} and add one
// observation x_i x_i^T at a time through Sherman-Morrison.
fn miller(problem: &RegressionProblem, active: &[usize], weights: &[f64]) -> Result<Array1<f64>> {
    let m = active.len();
    let xa = problem.design().select(Axis(1), active);
    let mut inv = Array2::<f64>::from_diag(&Array1::from(weights.to_vec()));
    let mut v = Array1::<f64>::zeros(m);
    for row in xa.rows() {
        ndarray::linalg::general_mat_vec_mul(1.0, &inv, &row, 0.0, &mut v);
        let denom = 1.0 + row.dot(&v);
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(SlogError::SingularSystem);
        }
        let scale = 1.0 / denom;
        for (r, mut inv_row) in inv.rows_mut().into_iter().enumerate() {
            let vr = v[r] * scale;
            inv_row.scaled_add(-vr, &v);
        }
    }
    let xty = problem.xty();
    let rhs: Array1<f64> = active.iter().map(|&j| xty[j]).collect();
    Ok(inv.dot(&rhs))
}
