//! Schedules and the register-pressure evaluator.
//!
//! Time-steps are 1-based. A value produced at step `p` is live at every step
//! `t` with `p < t <= last`, where `last` is the latest step of any of its data
//! consumers. The producing step itself does not count the destination.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DepGraph, NodeId};

/// A linear order of all nodes; `order[t - 1]` executes at step `t`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub order: Vec<NodeId>,
}

impl Schedule {
    pub fn new(order: Vec<NodeId>) -> Self {
        Schedule { order }
    }

    pub fn from_indices(order: &[usize]) -> Self {
        Schedule { order: order.iter().map(|&i| NodeId::from_index(i)).collect() }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 1-based step of each node. Only meaningful for permutations.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (k, id) in self.order.iter().enumerate() {
            pos[id.index()] = k + 1;
        }
        pos
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("schedule is not a valid topological order of the graph")]
    InvalidSchedule,
}

/// Per-step register pressure of a schedule.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PressureTrace {
    pub per_step: Vec<u64>,
    pub max_rp: u64,
}

impl PressureTrace {
    /// Steps (1-based) at which the maximum is attained.
    pub fn peak_steps(&self) -> impl Iterator<Item = usize> + '_ {
        self.per_step.iter().enumerate().filter(move |&(_, &rp)| rp == self.max_rp).map(|(k, _)| k + 1)
    }
}

/// True iff `order` is a permutation of the graph's nodes respecting every edge.
pub fn is_valid_schedule(graph: &DepGraph, order: &[NodeId]) -> bool {
    let n = graph.len();
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (k, id) in order.iter().enumerate() {
        match pos.get_mut(id.index()) {
            Some(slot) if *slot == usize::MAX => *slot = k,
            _ => return false,
        }
    }
    graph
        .data_edges()
        .iter()
        .chain(graph.order_edges())
        .all(|&(a, b)| pos[a.index()] < pos[b.index()])
}

/// Register pressure at every step of `schedule`.
pub fn evaluate_pressure(graph: &DepGraph, schedule: &Schedule) -> Result<PressureTrace, ScheduleError> {
    if !is_valid_schedule(graph, &schedule.order) {
        return Err(ScheduleError::InvalidSchedule);
    }
    Ok(pressure_of_valid(graph, &schedule.order))
}

/// Evaluator for orders already known to be valid.
pub(crate) fn pressure_of_valid(graph: &DepGraph, order: &[NodeId]) -> PressureTrace {
    let n = order.len();
    let mut pos = vec![0usize; n];
    for (k, id) in order.iter().enumerate() {
        pos[id.index()] = k + 1;
    }
    // difference array over steps 1..=n
    let mut delta = vec![0i64; n + 2];
    for id in graph.node_ids() {
        let size = graph.def_size(id) as i64;
        if size == 0 {
            continue;
        }
        let last = graph.data_consumers(id).iter().map(|c| pos[c.index()]).max();
        if let Some(last) = last {
            let first = pos[id.index()] + 1;
            if first <= last {
                delta[first] += size;
                delta[last + 1] -= size;
            }
        }
    }
    let mut per_step = Vec::with_capacity(n);
    let mut running = 0i64;
    for d in &delta[1..=n] {
        running += d;
        per_step.push(running as u64);
    }
    let max_rp = per_step.iter().copied().max().unwrap_or(0);
    PressureTrace { per_step, max_rp }
}

/// Step of the latest-scheduled data consumer of each node, maintained while a
/// bottom-up scheduler fills steps from `N` downward. `-1` means no consumer
/// has been placed yet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiveTs {
    steps: Vec<i64>,
}

impl LiveTs {
    pub fn new(node_count: usize) -> Self {
        LiveTs { steps: vec![-1; node_count] }
    }

    #[inline]
    pub fn get(&self, id: NodeId) -> i64 {
        self.steps[id.index()]
    }

    /// Records that `node` was placed at `step`.
    pub fn record_placement(&mut self, graph: &DepGraph, node: NodeId, step: usize) {
        let step = step as i64;
        for &src in graph.data_sources(node) {
            let slot = &mut self.steps[src.index()];
            *slot = (*slot).max(step);
        }
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.steps
    }
}

/// Recomputes [`LiveTs`] from scratch for a partial bottom-up schedule given as
/// `(node, step)` placements.
pub fn last_use_steps(graph: &DepGraph, placed: &[(NodeId, usize)]) -> LiveTs {
    let mut live = LiveTs::new(graph.len());
    for &(node, step) in placed {
        live.record_placement(graph, node, step);
    }
    live
}
