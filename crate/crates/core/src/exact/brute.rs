use crate::graph::{DepGraph, NodeId};
use crate::schedule::Schedule;

use super::{ExactError, OptimalResult, SolveStatus};

pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 10;

/// Enumerates every topological order and keeps the best (first found on ties).
///
/// Pressure is recomputed at each step straight from the liveness definition,
/// without sharing code with the main evaluator.
pub fn solve_bruteforce(graph: &DepGraph, node_limit: usize) -> Result<OptimalResult, ExactError> {
    let n = graph.len();
    if n > node_limit {
        return Err(ExactError::TooLarge { nodes: n, limit: node_limit });
    }
    let mut walk = Walk {
        graph,
        placed: vec![false; n],
        order: Vec::with_capacity(n),
        best: u64::MAX,
        best_order: Vec::new(),
        leaves: 0,
    };
    walk.recurse(0);
    Ok(OptimalResult {
        status: SolveStatus::Optimal,
        best_schedule: Some(Schedule::new(walk.best_order)),
        best_max_rp: if n == 0 { 0 } else { walk.best },
        proven_lower_bound: if n == 0 { 0 } else { walk.best },
        nodes_expanded: walk.leaves,
    })
}

struct Walk<'g> {
    graph: &'g DepGraph,
    placed: Vec<bool>,
    order: Vec<NodeId>,
    best: u64,
    best_order: Vec<NodeId>,
    leaves: u64,
}

impl Walk<'_> {
    /// Sum of sizes of placed producers with at least one unplaced consumer.
    fn pressure_now(&self) -> u64 {
        self.graph
            .node_ids()
            .filter(|&i| self.placed[i.index()])
            .filter(|&i| self.graph.data_consumers(i).iter().any(|c| !self.placed[c.index()]))
            .map(|i| self.graph.def_size(i) as u64)
            .sum()
    }

    fn recurse(&mut self, peak: u64) {
        let n = self.graph.len();
        if self.order.len() == n {
            self.leaves += 1;
            if peak < self.best || self.best_order.is_empty() {
                self.best = peak;
                self.best_order = self.order.clone();
            }
            return;
        }
        // the step about to be filled sees exactly the currently live values
        let peak = peak.max(self.pressure_now());
        for v in 0..n {
            let id = NodeId::from_index(v);
            if self.placed[v] || self.graph.preds(id).iter().any(|p| !self.placed[p.index()]) {
                continue;
            }
            self.placed[v] = true;
            self.order.push(id);
            self.recurse(peak);
            self.order.pop();
            self.placed[v] = false;
        }
    }
}
