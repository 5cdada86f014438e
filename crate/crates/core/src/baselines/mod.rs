//! Comparator solvers: coordinate descent, Lai's IRLS, and the proximal-gradient oracle.

pub mod cd;
pub mod ista;
pub mod lai;

pub use cd::{lambda_max, lambda_path, solve_cd, CdConfig};
pub use ista::{run_ista, solve_ista, solve_ista_with, OracleConfig};
pub use lai::{lai_epsilon, solve_lai_irls, LaiConfig};
