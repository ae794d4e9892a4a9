use std::collections::{BTreeSet, VecDeque};

use crate::graph::{DepGraph, NodeId};
use crate::schedule::{LiveTs, Schedule};
use crate::sethi_ullman::{Priority, SuAnalysis};

use super::TieBreak;

/// Total order on ready nodes: priority ascending, then the tie-break field,
/// then node id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ReadyKey {
    pub priority: Priority,
    secondary: i64,
    pub node: NodeId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeStatus {
    Unready,
    Queued,
    Work,
    Placed,
}

/// Observable scheduler actions, recorded when tracing is enabled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchedulerEvent {
    /// The queue top was taken; `work_len` is the work-set size at that moment.
    QueuePop { node: NodeId, work_len: usize },
    /// A node left the queue other than by popping the top.
    QueueRemove { node: NodeId },
    Place { node: NodeId, step: usize },
}

/// Mutable state of one bottom-up list-scheduling run.
pub struct SchedulerState<'g> {
    graph: &'g DepGraph,
    keys: Vec<ReadyKey>,
    ready_queue: BTreeSet<ReadyKey>,
    work_set: VecDeque<NodeId>,
    live_ts: LiveTs,
    time_step: usize,
    placed: Vec<NodeId>,
    status: Vec<NodeStatus>,
    pending_succs: Vec<usize>,
    events: Option<Vec<SchedulerEvent>>,
}

impl<'g> SchedulerState<'g> {
    /// Fresh state with every successor-free node in the ready queue.
    pub fn new(graph: &'g DepGraph, analysis: &SuAnalysis, tie_break: TieBreak) -> Self {
        let keys: Vec<ReadyKey> = graph
            .node_ids()
            .map(|node| ReadyKey {
                priority: analysis.priority(node),
                secondary: match tie_break {
                    TieBreak::UsesThenId => -(graph.use_count(node) as i64),
                    TieBreak::IdOnly => 0,
                },
                node,
            })
            .collect();
        let n = graph.len();
        let mut state = SchedulerState {
            graph,
            keys,
            ready_queue: BTreeSet::new(),
            work_set: VecDeque::new(),
            live_ts: LiveTs::new(n),
            time_step: n,
            placed: vec![NodeId(0); n],
            status: vec![NodeStatus::Unready; n],
            pending_succs: graph.node_ids().map(|id| graph.succs(id).len()).collect(),
            events: None,
        };
        for id in graph.node_ids() {
            if state.pending_succs[id.index()] == 0 {
                state.enqueue(id);
            }
        }
        state
    }

    pub fn record_events(&mut self) {
        self.events = Some(Vec::new());
    }

    pub fn take_events(&mut self) -> Vec<SchedulerEvent> {
        self.events.take().unwrap_or_default()
    }

    fn log(&mut self, event: SchedulerEvent) {
        if let Some(events) = &mut self.events {
            events.push(event);
        }
    }

    pub fn graph(&self) -> &'g DepGraph {
        self.graph
    }

    pub fn key(&self, id: NodeId) -> ReadyKey {
        self.keys[id.index()]
    }

    pub fn status(&self, id: NodeId) -> NodeStatus {
        self.status[id.index()]
    }

    pub fn live_ts(&self) -> &LiveTs {
        &self.live_ts
    }

    /// Next step to fill; counts down from N.
    pub fn time_step(&self) -> usize {
        self.time_step
    }

    pub fn queue_top(&self) -> Option<NodeId> {
        self.ready_queue.first().map(|k| k.node)
    }

    pub fn queue_len(&self) -> usize {
        self.ready_queue.len()
    }

    pub fn work_len(&self) -> usize {
        self.work_set.len()
    }

    pub fn is_done(&self) -> bool {
        self.time_step == 0
    }

    fn enqueue(&mut self, id: NodeId) {
        self.status[id.index()] = NodeStatus::Queued;
        self.ready_queue.insert(self.keys[id.index()]);
    }

    pub fn pop_queue(&mut self) -> Option<NodeId> {
        let key = self.ready_queue.pop_first()?;
        self.status[key.node.index()] = NodeStatus::Unready;
        let work_len = self.work_set.len();
        self.log(SchedulerEvent::QueuePop { node: key.node, work_len });
        Some(key.node)
    }

    pub fn remove_from_queue(&mut self, id: NodeId) {
        let removed = self.ready_queue.remove(&self.keys[id.index()]);
        debug_assert!(removed, "node {id} was not queued");
        self.status[id.index()] = NodeStatus::Unready;
        self.log(SchedulerEvent::QueueRemove { node: id });
    }

    pub fn push_work(&mut self, id: NodeId) {
        self.status[id.index()] = NodeStatus::Work;
        self.work_set.push_back(id);
    }

    /// Register-pressure change of placing `j` now: its own output if it is
    /// needed later, minus every source whose live range this placement opens.
    pub fn rp_delta(&self, j: NodeId) -> i64 {
        let graph = self.graph;
        let mut d = if self.live_ts.get(j) > 0 { graph.def_size(j) as i64 } else { 0 };
        for &m in graph.data_sources(j) {
            if self.live_ts.get(m) < 0 {
                d -= graph.def_size(m) as i64;
            }
        }
        d
    }

    /// Places `id` at the current step and returns the predecessors that
    /// became ready, in id order.
    fn place(&mut self, id: NodeId) -> Vec<NodeId> {
        let step = self.time_step;
        debug_assert!(step > 0);
        self.placed[step - 1] = id;
        self.status[id.index()] = NodeStatus::Placed;
        self.live_ts.record_placement(self.graph, id, step);
        self.time_step -= 1;
        self.log(SchedulerEvent::Place { node: id, step });
        let mut ready = Vec::new();
        for &p in self.graph.preds(id) {
            let pending = &mut self.pending_succs[p.index()];
            *pending -= 1;
            if *pending == 0 {
                ready.push(p);
            }
        }
        ready
    }

    /// Places work-set nodes in FIFO order until it is empty. With
    /// `rp_reduction`, newly ready nodes that do not raise pressure join the
    /// work set directly; everything else goes to the ready queue.
    pub fn drain_work(&mut self, rp_reduction: bool) {
        while let Some(i) = self.work_set.pop_front() {
            for j in self.place(i) {
                if rp_reduction && self.rp_delta(j) >= 0 {
                    self.push_work(j);
                } else {
                    self.enqueue(j);
                }
            }
        }
    }

    pub fn into_schedule(self) -> Schedule {
        assert!(self.is_done(), "scheduler stopped with {} nodes unplaced", self.time_step);
        Schedule::new(self.placed)
    }
}

/// Free-function form of [`SchedulerState::rp_delta`].
pub fn rp_delta(state: &SchedulerState<'_>, j: NodeId) -> i64 {
    state.rp_delta(j)
}
