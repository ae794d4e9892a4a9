use crate::graph::{DepGraph, NodeId};
use crate::schedule::Schedule;
use crate::sethi_ullman::compute_su;

use super::state::{NodeStatus, SchedulerEvent, SchedulerState};
use super::TieBreak;

/// Unscheduled nodes transitively sharing a data source with the queue top,
/// sorted by ready-queue key. Empty when the queue is empty.
pub fn form_cluster(state: &SchedulerState<'_>) -> Vec<NodeId> {
    let Some(top) = state.queue_top() else {
        return Vec::new();
    };
    form_cluster_from(state, top)
}

pub(crate) fn form_cluster_from(state: &SchedulerState<'_>, seed: NodeId) -> Vec<NodeId> {
    let graph = state.graph();
    let mut in_cluster = vec![false; graph.len()];
    let mut members = vec![seed];
    in_cluster[seed.index()] = true;
    let mut cursor = 0;
    while cursor < members.len() {
        let m = members[cursor];
        cursor += 1;
        for &src in graph.data_sources(m) {
            for &peer in graph.data_consumers(src) {
                if !in_cluster[peer.index()] && state.status(peer) != NodeStatus::Placed {
                    in_cluster[peer.index()] = true;
                    members.push(peer);
                }
            }
        }
    }
    members.sort_by_key(|&m| state.key(m));
    members
}

/// A queued node reached from `j` by repeatedly stepping to its first unplaced
/// successor in key order. Placing it brings `j` closer to ready.
pub fn find_unblocker(state: &SchedulerState<'_>, j: NodeId) -> NodeId {
    let graph = state.graph();
    let mut cur = j;
    loop {
        if state.status(cur) == NodeStatus::Queued {
            return cur;
        }
        cur = graph
            .succs(cur)
            .iter()
            .copied()
            .filter(|&s| state.status(s) != NodeStatus::Placed)
            .min_by_key(|&s| state.key(s))
            .unwrap_or_else(|| panic!("node {cur} is neither ready nor blocked by an unplaced successor"));
    }
}

pub(crate) fn cluster_schedule(
    graph: &DepGraph,
    adjust: bool,
    tie_break: TieBreak,
    events: Option<&mut Vec<SchedulerEvent>>,
) -> Schedule {
    let analysis = compute_su(graph, adjust);
    let mut state = SchedulerState::new(graph, &analysis, tie_break);
    if events.is_some() {
        state.record_events();
    }
    while state.queue_top().is_some() {
        let cluster = form_cluster(&state);
        match cluster.iter().copied().find(|&m| state.status(m) != NodeStatus::Queued) {
            None => {
                for m in cluster {
                    state.remove_from_queue(m);
                    state.push_work(m);
                }
            }
            Some(blocked) => {
                let k = find_unblocker(&state, blocked);
                state.remove_from_queue(k);
                state.push_work(k);
            }
        }
        state.drain_work(true);
    }
    if let Some(out) = events {
        out.extend(state.take_events());
    }
    state.into_schedule()
}

/// Clustering list scheduler with RP-reduction.
pub fn schedule_cluster(graph: &DepGraph, adjust: bool) -> Schedule {
    cluster_schedule(graph, adjust, TieBreak::default(), None)
}
