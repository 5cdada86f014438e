//! The SLOG recursion, its thresholded variant and supporting linear algebra.

mod config;
pub mod one_d;
mod solver;
mod system;
mod update;

pub use config::{start_vector, Inversion, SolverConfig, StartStrategy};
pub use one_d::{one_d_closed_form, one_d_lasso, one_d_rate_bound, one_d_step};
pub(crate) use solver::run_recursion;
pub use solver::solve_slog;
pub use system::{invert_active_system, solve_weighted};
pub(crate) use update::WeightRule;
pub use update::{slog_update, SlogState};
