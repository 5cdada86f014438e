//! Lasso-family solvers built on the SLOG recursion, with comparators,
//! synthetic data, and an experiment harness.
//!
//! All solvers work on a [`RegressionProblem`] whose columns satisfy
//! `sum_i x_ij^2 = n` and whose response is centered; see [`standardize`].

// Validation is written as `!(x > 0.0)` throughout so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod error;
pub mod kkt;
pub mod linalg;
pub mod penalty;
pub mod problem;
pub mod simdata;
pub mod slog;
pub mod trace;
pub mod variants;

pub use error::{Result, SlogError};
pub use kkt::{kkt_check, KktReport, DEFAULT_KKT_TOL};
pub use penalty::{objective, sign, soft_threshold, Groups, PenaltySpec};
pub use problem::{standardize, RegressionProblem, Standardization};
pub use slog::{slog_update, solve_slog, Inversion, SlogState, SolverConfig, StartStrategy};
pub use trace::{relative_distance, relative_step, Reference, SolverResult, StopReason, TraceRecord};
