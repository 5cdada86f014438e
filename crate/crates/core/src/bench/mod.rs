//! Experiment orchestration: solver grids, cross-validation and trace summaries.

pub mod cv;
pub mod grid;
pub mod zeros;

pub use cv::{cross_validate, fold_assignment, CvPoint};
pub use grid::{run_grid, Algorithm, AlgorithmConfigs, ComparisonMode, ExperimentGrid, RunRecord, RUNS_CSV_HEADER};
pub use zeros::{effective_zero_counts, EFFECTIVE_ZERO};
