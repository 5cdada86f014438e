use ndarray::Array1;

use crate::error::{Result, SlogError};
use crate::penalty::{rss, Groups, PenaltySpec};
use crate::problem::RegressionProblem;
use crate::slog::{run_recursion, start_vector, SolverConfig, WeightRule};
use crate::trace::SolverResult;

/// Every member of group `m` carries the weight `||b_(m)|| / lambda`; a group
/// whose norm drops to the threshold is zeroed as a whole.
struct GroupRule<'a> {
    lambda: f64,
    groups: &'a Groups,
    threshold: f64,
}

impl WeightRule for GroupRule<'_> {
    fn weights(&mut self, b: &Array1<f64>, active: &mut Vec<usize>, weights: &mut Vec<f64>) {
        let norms = self.groups.norms(b.view());
        for j in 0..b.len() {
            let w = norms[self.groups.group_of(j)] / self.lambda;
            if w > 0.0 {
                active.push(j);
                weights.push(w);
            }
        }
    }

    fn prune(&self, b: &mut Array1<f64>) {
        let norms = self.groups.norms(b.view());
        for (m, idx) in self.groups.members().iter().enumerate() {
            if norms[m] <= self.threshold {
                for &j in idx {
                    b[j] = 0.0;
                }
            }
        }
    }

    fn objective(&self, problem: &RegressionProblem, b: &Array1<f64>) -> f64 {
        rss(problem, b.view()) + 2.0 * self.lambda * self.groups.norms(b.view()).sum()
    }
}

/// Group lasso `||y - Xb||^2 + 2 lambda sum_m ||b_(m)||_2` via the SLOG-type recursion.
pub fn solve_group_slog(problem: &RegressionProblem, lambda: f64, groups: &Groups, config: &SolverConfig) -> Result<SolverResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(SlogError::InvalidPenalty(format!("lambda must be > 0, got {lambda}")));
    }
    PenaltySpec::GroupLasso {
        lambda,
        groups: groups.clone(),
    }
    .validate(problem.p())?;
    config.validate(problem.p())?;
    let start = start_vector(problem, lambda, &config.start);
    let mut rule = GroupRule {
        lambda,
        groups,
        threshold: config.threshold,
    };
    run_recursion(problem, config, lambda, start, &mut rule)
}
