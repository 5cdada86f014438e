//! Elastic-net, group, annealed and block-hybrid relatives of SLOG.

pub mod anneal;
pub mod enet;
pub mod group;
pub mod hybrid;

pub use anneal::{sample_inverse_gaussian, solve_aslog, AnnealSchedule};
pub use enet::solve_enet_slog;
pub use group::solve_group_slog;
pub use hybrid::{cross_block_coupling, solve_hybrid, BlockPartition, BlockSolver, HybridOutcome};
