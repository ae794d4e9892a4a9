//! Generalized Sethi-Ullman numbering.
//!
//! For node `i` with data sources (children) `c_1..c_k` sorted so that
//! `MaxRP(c) - DefSZ(c)` is non-increasing:
//!
//! ```text
//! MaxRP(i) = max( max_j ( DefSZ(c_1) + .. + DefSZ(c_{j-1}) + MaxRP(c_j) ),
//!                 DefSZ(c_1) + .. + DefSZ(c_k) )
//! ```
//!
//! and leaves get `MaxRP = 0`. On trees the root value is the optimal peak
//! pressure and [`schedule_tree`] realizes it; on general DAGs the values only
//! serve as list-scheduling priorities. Order edges are ignored.

use num_rational::Ratio;
use thiserror::Error;

use crate::graph::{DepGraph, NodeId};
use crate::schedule::Schedule;

pub type Priority = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuAnalysis {
    pub max_rp: Vec<u64>,
    pub def_size: Vec<u64>,
    pub use_count: Vec<usize>,
    /// `max_rp - def_size`.
    pub su_number: Vec<i64>,
    /// `max_rp / max(use_count, 1) - def_size`, present when requested.
    pub adjusted_priority: Option<Vec<Priority>>,
}

impl SuAnalysis {
    /// Ready-queue key: the adjusted priority when computed, else the SU number.
    pub fn priority(&self, id: NodeId) -> Priority {
        match &self.adjusted_priority {
            Some(adj) => adj[id.index()],
            None => Priority::from_integer(self.su_number[id.index()]),
        }
    }

    /// Children of `id` in evaluation order: SU number descending, then id.
    pub fn ordered_children(&self, graph: &DepGraph, id: NodeId) -> Vec<NodeId> {
        let mut children = graph.data_sources(id).to_vec();
        children.sort_by(|a, b| self.su_number[b.index()].cmp(&self.su_number[a.index()]).then(a.cmp(b)));
        children
    }
}

/// Combines child values into the parent's MaxRP. Children must already be in
/// evaluation order.
pub fn combine_children(children: impl IntoIterator<Item = (u64, u64)>) -> u64 {
    let mut prefix = 0u64;
    let mut best = 0u64;
    for (max_rp, def_size) in children {
        best = best.max(prefix + max_rp);
        prefix += def_size;
    }
    best.max(prefix)
}

pub fn compute_su(graph: &DepGraph, adjust_by_uses: bool) -> SuAnalysis {
    let n = graph.len();
    let def_size: Vec<u64> = graph.nodes().iter().map(|n| n.def_size as u64).collect();
    let use_count: Vec<usize> = graph.node_ids().map(|id| graph.use_count(id)).collect();
    let mut max_rp = vec![0u64; n];
    let mut su_number = vec![0i64; n];
    for id in graph.topo_order() {
        let mut children: Vec<NodeId> = graph.data_sources(id).to_vec();
        children.sort_by(|a, b| su_number[b.index()].cmp(&su_number[a.index()]).then(a.cmp(b)));
        let value = combine_children(children.iter().map(|c| (max_rp[c.index()], def_size[c.index()])));
        max_rp[id.index()] = value;
        su_number[id.index()] = value as i64 - def_size[id.index()] as i64;
    }
    let adjusted_priority = adjust_by_uses.then(|| {
        (0..n)
            .map(|i| Ratio::new(max_rp[i] as i64, use_count[i].max(1) as i64) - Ratio::from_integer(def_size[i] as i64))
            .collect()
    });
    SuAnalysis { max_rp, def_size, use_count, su_number, adjusted_priority }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("graph is not a tree: node {0} has {1} consumers")]
    MultipleUses(NodeId, usize),
    #[error("graph is not a tree: it has order edges")]
    OrderEdges,
}

/// Contiguous subtree evaluation, children in descending SU order.
pub fn schedule_tree(graph: &DepGraph, analysis: &SuAnalysis) -> Result<Schedule, TreeError> {
    if !graph.order_edges().is_empty() {
        return Err(TreeError::OrderEdges);
    }
    if let Some(id) = graph.node_ids().find(|&id| graph.use_count(id) > 1) {
        return Err(TreeError::MultipleUses(id, graph.use_count(id)));
    }
    let mut roots: Vec<NodeId> = graph.node_ids().filter(|&id| graph.use_count(id) == 0).collect();
    roots.sort_by(|a, b| analysis.su_number[b.index()].cmp(&analysis.su_number[a.index()]).then(a.cmp(b)));

    let mut order = Vec::with_capacity(graph.len());
    let mut stack: Vec<(NodeId, bool)> = roots.into_iter().rev().map(|r| (r, false)).collect();
    while let Some((id, expanded)) = stack.pop() {
        if expanded {
            order.push(id);
            continue;
        }
        stack.push((id, true));
        for child in analysis.ordered_children(graph, id).into_iter().rev() {
            stack.push((child, false));
        }
    }
    Ok(Schedule::new(order))
}
