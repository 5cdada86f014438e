//! K-fold cross-validation over sparsity levels.

use ndarray::{Array1, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SlogError};
use crate::problem::{standardize, RegressionProblem};
use crate::simdata::{calibrate_lambda, SparsityTarget};

#[derive(Debug, Clone, PartialEq)]
pub struct CvPoint {
    pub s: f64,
    /// Held-out mean squared prediction error per fold, on the raw response scale.
    pub fold_mse: Vec<f64>,
    pub mean_mse: f64,
}

/// Fold label of every observation: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut label = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        label[i] = pos % folds;
    }
    label
}

/// For each sparsity level, calibrates and fits the lasso on every training
/// split and scores it on the held-out rows.
pub fn cross_validate(problem: &RegressionProblem, s_grid: &[f64], folds: usize, seed: u64) -> Result<Vec<CvPoint>> {
    let n = problem.n();
    if folds < 2 || folds > n {
        return Err(SlogError::InvalidConfig(format!("folds must be in 2..={n}, got {folds}")));
    }
    if s_grid.is_empty() {
        return Err(SlogError::InvalidConfig("no sparsity levels given".into()));
    }
    let targets = s_grid.iter().map(|&s| SparsityTarget::new(s)).collect::<Result<Vec<_>>>()?;
    let (x, y) = problem.original_data();
    let label = fold_assignment(n, folds, seed);

    let mut fold_mse = vec![Vec::with_capacity(folds); s_grid.len()];
    for f in 0..folds {
        let train: Vec<usize> = (0..n).filter(|&i| label[i] != f).collect();
        let test: Vec<usize> = (0..n).filter(|&i| label[i] == f).collect();
        if train.len() < 2 {
            return Err(SlogError::InvalidConfig(format!("fold {f} leaves fewer than 2 training rows")));
        }
        let fit_problem = standardize(x.select(Axis(0), &train).view(), y.select(Axis(0), &train).view())?;
        let st = fit_problem.standardization();
        for (slot, &target) in fold_mse.iter_mut().zip(&targets) {
            let b = calibrate_lambda(&fit_problem, target)?.solution;
            let sse: f64 = test
                .iter()
                .map(|&i| (y[i] - st.predict_original(b.view(), x.row(i))).powi(2))
                .sum();
            slot.push(sse / test.len() as f64);
        }
    }

    Ok(s_grid
        .iter()
        .zip(fold_mse)
        .map(|(&s, fold_mse)| {
            let mean_mse = Array1::from(fold_mse.clone()).mean().unwrap_or(f64::NAN);
            CvPoint { s, fold_mse, mean_mse }
        })
        .collect())
}
