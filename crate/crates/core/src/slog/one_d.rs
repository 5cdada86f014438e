//! Closed-form iterates and convergence bounds when `p = 1`.
//!
//! With `beta_hat = x^T y / n` and `c = n |beta_hat| / lambda` the iterates are
//! `b_k = c^k lambda |b_0| sign(beta_hat) / (lambda + n |b_0| sum_{m<k} c^m)`.

use crate::penalty::{sign, soft_threshold};

/// The one-dimensional lasso solution `soft(beta_hat, lambda / n)`.
pub fn one_d_lasso(beta_hat: f64, lambda: f64, n: usize) -> f64 {
    soft_threshold(beta_hat, lambda / n as f64)
}

/// One step of the scalar recursion `b <- |b| beta_hat / (lambda / n + |b|)`.
pub fn one_d_step(beta_hat: f64, lambda: f64, n: usize, b: f64) -> f64 {
    b.abs() * beta_hat / (lambda / n as f64 + b.abs())
}

/// The `k`-th iterate in closed form.
pub fn one_d_closed_form(beta_hat: f64, lambda: f64, n: usize, b0: f64, k: u32) -> f64 {
    if k == 0 {
        return b0;
    }
    if b0 == 0.0 || beta_hat == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let a0 = b0.abs();
    let c = nf * beta_hat.abs() / lambda;
    let mag = if c > 1.0 {
        // Divide through by c^k so nothing overflows: the sum becomes sum_{j=1..k} c^{-j}.
        let r = 1.0 / c;
        let mut pow = 1.0;
        let mut sum = 0.0;
        for _ in 0..k {
            pow *= r;
            sum += pow;
        }
        lambda * a0 / (lambda * pow + nf * a0 * sum)
    } else {
        let mut pow = 1.0;
        let mut sum = 0.0;
        for _ in 0..k {
            sum += pow;
            pow *= c;
        }
        pow * lambda * a0 / (lambda + nf * a0 * sum)
    };
    sign(beta_hat) * mag
}

/// Upper bound on `|b_k - lasso|` for the three regimes of `n |beta_hat|` vs `lambda`.
pub fn one_d_rate_bound(beta_hat: f64, lambda: f64, n: usize, b0: f64, k: u32) -> f64 {
    debug_assert!(b0 != 0.0 && k >= 1);
    let nf = n as f64;
    let target = one_d_lasso(beta_hat, lambda, n);
    let scaled = nf * beta_hat.abs();
    if scaled < lambda {
        (scaled / lambda).powi(k as i32) * (b0 - target).abs()
    } else if scaled == lambda {
        lambda / (nf * k as f64)
    } else {
        (lambda / scaled).powi(k as i32) * (beta_hat / b0).abs() * (b0 - target).abs()
    }
}
