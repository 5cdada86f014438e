use crate::error::{Result, SlogError};
use crate::trace::SolverResult;

/// Magnitudes below this count as effectively zero.
pub const EFFECTIVE_ZERO: f64 = 1e-13;

/// `(iteration, count of |b_j| < EFFECTIVE_ZERO)` for every retained iterate.
pub fn effective_zero_counts(result: &SolverResult) -> Result<Vec<(usize, usize)>> {
    let snaps = result.snapshots.as_ref().ok_or(SlogError::TraceNotRetained)?;
    Ok(snaps
        .iter()
        .map(|(k, b)| (*k, b.iter().filter(|v| v.abs() < EFFECTIVE_ZERO).count()))
        .collect())
}
