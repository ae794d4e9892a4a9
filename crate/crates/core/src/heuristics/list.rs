use crate::graph::DepGraph;
use crate::schedule::Schedule;
use crate::sethi_ullman::compute_su;

use super::state::{SchedulerEvent, SchedulerState};
use super::TieBreak;

/// Bottom-up list scheduling, queue keyed by SU number (or the use-adjusted
/// priority). With `rp_reduction`, nodes whose placement does not raise
/// pressure bypass the queue.
pub(crate) fn list_schedule(
    graph: &DepGraph,
    rp_reduction: bool,
    adjust: bool,
    tie_break: TieBreak,
    events: Option<&mut Vec<SchedulerEvent>>,
) -> Schedule {
    let analysis = compute_su(graph, adjust);
    let mut state = SchedulerState::new(graph, &analysis, tie_break);
    let tracing = events.is_some();
    if tracing {
        state.record_events();
    }
    while let Some(top) = state.pop_queue() {
        state.push_work(top);
        state.drain_work(rp_reduction);
    }
    if let Some(out) = events {
        out.extend(state.take_events());
    }
    state.into_schedule()
}

/// Plain SU list scheduler.
pub fn schedule_su(graph: &DepGraph) -> Schedule {
    list_schedule(graph, false, false, TieBreak::default(), None)
}

/// SU list scheduler with RP-reduction, optionally with use-adjusted priorities.
pub fn schedule_su_rp(graph: &DepGraph, adjust: bool) -> Schedule {
    list_schedule(graph, true, adjust, TieBreak::default(), None)
}
