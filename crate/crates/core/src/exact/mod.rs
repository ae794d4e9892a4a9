//! Exact peak-pressure minimization: the boolean model with its checker, a
//! branch-and-bound search, and an exhaustive enumerator used as the oracle.

mod brute;
mod model;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::Schedule;

pub use brute::{solve_bruteforce, DEFAULT_BRUTE_FORCE_LIMIT};
pub use model::{check_assignment, encode, CheckError, CheckReport, Constraint, ConstraintSystem, VarId, VarKind};
pub use search::{solve_exact, solve_exact_with_progress, Progress};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Search completed; `best_max_rp` is the minimum.
    Optimal,
    /// Time ran out with an incumbent.
    Feasible,
    /// Time ran out before any schedule was found.
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalResult {
    pub status: SolveStatus,
    pub best_schedule: Option<Schedule>,
    pub best_max_rp: u64,
    pub proven_lower_bound: u64,
    pub nodes_expanded: u64,
}

impl OptimalResult {
    /// The optimum, if it was proven.
    pub fn optimal_value(&self) -> Option<u64> {
        (self.status == SolveStatus::Optimal).then_some(self.best_max_rp)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("graph has {nodes} nodes, enumeration limit is {limit}")]
    TooLarge { nodes: usize, limit: usize },
}
