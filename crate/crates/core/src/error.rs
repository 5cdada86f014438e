use thiserror::Error;

use crate::trace::SolverResult;

#[derive(Debug, Error)]
pub enum SlogError {
    #[error("column {0} has zero variance")]
    ConstantColumn(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid penalty: {0}")]
    InvalidPenalty(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),

    #[error("active linear system is numerically singular")]
    SingularSystem,

    /// The iteration cap was hit. The partial result (trace included) is kept.
    #[error("solver stopped after {} iterations without meeting its stopping rule", .0.iterations)]
    NotConverged(Box<SolverResult>),

    #[error("no penalty attains {target} nonzero coefficients (closest: {achieved})")]
    Unachievable { target: usize, achieved: usize },

    #[error("iterate snapshots were not retained for this run")]
    TraceNotRetained,
}

pub type Result<T> = std::result::Result<T, SlogError>;
