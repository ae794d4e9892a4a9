//! Branch-and-bound over forward schedule construction.
//!
//! A search state is the set of placed nodes. The pressure seen by the next
//! step depends only on that set (placed producers with an unplaced consumer),
//! so two prefixes with the same set share every completion; a state reached
//! again with a peak no better than before is pruned.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::graph::{DepGraph, NodeId};
use crate::heuristics::{run_variant, Variant};
use crate::schedule::{pressure_of_valid, Schedule};

use super::{OptimalResult, SolveStatus};

/// Memo entries kept before the table stops growing.
const MEMO_CAP: usize = 8_000_000;
const CLOCK_STRIDE: u64 = 1024;

/// Snapshot passed to progress callbacks whenever the incumbent improves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Progress {
    pub incumbent: u64,
    pub lower_bound: u64,
    pub nodes_expanded: u64,
}

pub fn solve_exact(graph: &DepGraph, time_limit: Duration) -> OptimalResult {
    solve_exact_with_progress(graph, time_limit, |_| {})
}

pub fn solve_exact_with_progress(
    graph: &DepGraph,
    time_limit: Duration,
    mut progress: impl FnMut(Progress),
) -> OptimalResult {
    let n = graph.len();
    if n == 0 {
        return OptimalResult {
            status: SolveStatus::Optimal,
            best_schedule: Some(Schedule::default()),
            best_max_rp: 0,
            proven_lower_bound: 0,
            nodes_expanded: 0,
        };
    }
    let deadline = Instant::now().checked_add(time_limit);

    // every node sees all of its sources live at its own step
    let static_bound = graph
        .node_ids()
        .map(|v| graph.data_sources(v).iter().map(|&s| graph.def_size(s) as u64).sum::<u64>())
        .max()
        .unwrap_or(0);

    let (mut best_order, mut best) = (Vec::new(), u64::MAX);
    for variant in Variant::ALL {
        let s = run_variant(graph, variant);
        let rp = pressure_of_valid(graph, &s.order).max_rp;
        if rp < best {
            best = rp;
            best_order = s.order;
        }
    }
    progress(Progress { incumbent: best, lower_bound: static_bound, nodes_expanded: 0 });

    let mut search = Search {
        graph,
        placed: vec![0u64; n.div_ceil(64)],
        pending_preds: graph.node_ids().map(|v| graph.preds(v).len()).collect(),
        remaining_uses: graph.node_ids().map(|v| graph.use_count(v)).collect(),
        live: 0,
        order: Vec::with_capacity(n),
        best,
        best_order,
        static_bound,
        memo: HashMap::new(),
        expanded: 0,
        deadline,
        timed_out: false,
        progress: &mut progress,
    };
    if search.best > static_bound {
        search.dfs(0);
    }
    let Search { best, best_order, expanded, timed_out, .. } = search;
    let (status, lower) = if timed_out && best > static_bound {
        (SolveStatus::Feasible, static_bound)
    } else {
        (SolveStatus::Optimal, best)
    };
    OptimalResult {
        status,
        best_schedule: Some(Schedule::new(best_order)),
        best_max_rp: best,
        proven_lower_bound: lower,
        nodes_expanded: expanded,
    }
}

struct Search<'a, F: FnMut(Progress)> {
    graph: &'a DepGraph,
    placed: Vec<u64>,
    pending_preds: Vec<usize>,
    remaining_uses: Vec<usize>,
    /// Pressure the next step will see.
    live: u64,
    order: Vec<NodeId>,
    best: u64,
    best_order: Vec<NodeId>,
    static_bound: u64,
    memo: HashMap<Box<[u64]>, u64>,
    expanded: u64,
    deadline: Option<Instant>,
    timed_out: bool,
    progress: &'a mut F,
}

impl<F: FnMut(Progress)> Search<'_, F> {
    fn is_placed(&self, v: NodeId) -> bool {
        self.placed[v.index() / 64] >> (v.index() % 64) & 1 == 1
    }

    /// Live pressure after placing `v`.
    fn live_after(&self, v: NodeId) -> u64 {
        let g = self.graph;
        let mut live = self.live;
        if g.use_count(v) > 0 {
            live += g.def_size(v) as u64;
        }
        for &s in g.data_sources(v) {
            if self.remaining_uses[s.index()] == 1 {
                live -= g.def_size(s) as u64;
            }
        }
        live
    }

    fn place(&mut self, v: NodeId) {
        let g = self.graph;
        self.live = self.live_after(v);
        self.placed[v.index() / 64] |= 1 << (v.index() % 64);
        for &s in g.data_sources(v) {
            self.remaining_uses[s.index()] -= 1;
        }
        for &c in g.succs(v) {
            self.pending_preds[c.index()] -= 1;
        }
        self.order.push(v);
    }

    fn unplace(&mut self, v: NodeId, live_before: u64) {
        let g = self.graph;
        self.order.pop();
        for &c in g.succs(v) {
            self.pending_preds[c.index()] += 1;
        }
        for &s in g.data_sources(v) {
            self.remaining_uses[s.index()] += 1;
        }
        self.placed[v.index() / 64] &= !(1 << (v.index() % 64));
        self.live = live_before;
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if self.expanded % CLOCK_STRIDE == 1 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out
    }

    fn dfs(&mut self, peak: u64) {
        let n = self.graph.len();
        if self.order.len() == n {
            if peak < self.best {
                self.best = peak;
                self.best_order = self.order.clone();
                (self.progress)(Progress { incumbent: peak, lower_bound: self.static_bound, nodes_expanded: self.expanded });
            }
            return;
        }
        self.expanded += 1;
        if self.out_of_time() {
            return;
        }
        let peak = peak.max(self.live);
        if peak.max(self.static_bound) >= self.best {
            return;
        }
        if let Some(&seen) = self.memo.get(&self.placed[..]) {
            if seen <= peak {
                return;
            }
        }
        if self.memo.len() < MEMO_CAP || self.memo.contains_key(&self.placed[..]) {
            self.memo.insert(self.placed.clone().into_boxed_slice(), peak);
        }

        let mut ready: Vec<(u64, NodeId)> = self
            .graph
            .node_ids()
            .filter(|&v| !self.is_placed(v) && self.pending_preds[v.index()] == 0)
            .map(|v| (self.live_after(v), v))
            .collect();
        ready.sort_unstable();
        // A ready node that does not raise the live pressure can be moved to the
        // front of any completion without raising any later step, so it is the
        // only branch needed.
        if let Some(&(after, _)) = ready.first() {
            if after <= self.live {
                ready.truncate(1);
            }
        }
        let live_before = self.live;
        for (_, v) in ready {
            self.place(v);
            self.dfs(peak);
            self.unplace(v, live_before);
            if self.timed_out || peak.max(self.static_bound) >= self.best {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::evaluate_pressure;

    #[test]
    fn empty_graph() {
        let g = DepGraph::from_sizes(&[], &[], &[]).unwrap();
        let r = solve_exact(&g, Duration::from_secs(1));
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.best_max_rp, 0);
    }

    #[test]
    fn diamond() {
        let g = DepGraph::from_sizes(&[1; 4], &[(0, 1), (0, 2), (1, 3), (2, 3)], &[]).unwrap();
        let r = solve_exact(&g, Duration::from_secs(1));
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.best_max_rp, 2);
        assert_eq!(r.proven_lower_bound, 2);
        let s = r.best_schedule.unwrap();
        assert_eq!(evaluate_pressure(&g, &s).unwrap().max_rp, 2);
    }

    #[test]
    fn zero_budget_still_returns_incumbent() {
        let g = DepGraph::from_sizes(&[1; 6], &[(0, 3), (1, 3), (2, 4), (3, 5), (4, 5), (0, 4)], &[]).unwrap();
        let r = solve_exact(&g, Duration::ZERO);
        assert!(r.best_schedule.is_some());
        assert!(r.proven_lower_bound <= r.best_max_rp);
    }
}
