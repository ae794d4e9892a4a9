//! Dependence-graph data model.
//!
//! A [`DepGraph`] is an immutable DAG over instruction nodes. Data edges carry
//! a register value from producer to consumer; order edges only constrain the
//! execution order. Both kinds participate in schedule legality, only data
//! edges participate in liveness.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense index of a node within its owning graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index exceeds u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One instruction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    /// Register units written by this instruction.
    pub def_size: u32,
    pub label: Option<String>,
}

impl Node {
    pub fn new(index: usize, def_size: u32) -> Self {
        Node { id: NodeId::from_index(index), def_size, label: None }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

pub type Edge = (NodeId, NodeId);

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("dependence cycle: {}", fmt_path(.path))]
    CycleDetected { path: Vec<NodeId> },
    #[error("edge references unknown node {id}")]
    DanglingNode { id: u64 },
    #[error("duplicate edge {}->{}", .pair.0, .pair.1)]
    DuplicateEdge { pair: Edge },
    #[error("node at position {position} carries id {id}")]
    MisnumberedNode { position: usize, id: NodeId },
}

fn fmt_path(path: &[NodeId]) -> String {
    path.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" -> ")
}

/// Checks the structural invariants of a graph given as raw parts.
///
/// The first violation found is reported, in this order: misnumbered nodes,
/// dangling edge endpoints, duplicate edges, cycles (self-edges included).
pub fn validate_graph(nodes: &[Node], data_edges: &[Edge], order_edges: &[Edge]) -> Result<(), GraphError> {
    let n = nodes.len();
    for (position, node) in nodes.iter().enumerate() {
        if node.id.index() != position {
            return Err(GraphError::MisnumberedNode { position, id: node.id });
        }
    }
    for &(a, b) in data_edges.iter().chain(order_edges) {
        for id in [a, b] {
            if id.index() >= n {
                return Err(GraphError::DanglingNode { id: id.0 as u64 });
            }
        }
    }
    for edges in [data_edges, order_edges] {
        let mut seen = HashSet::with_capacity(edges.len());
        for &pair in edges {
            if !seen.insert(pair) {
                return Err(GraphError::DuplicateEdge { pair });
            }
        }
    }
    let mut succs = vec![Vec::new(); n];
    for &(a, b) in data_edges.iter().chain(order_edges) {
        succs[a.index()].push(b);
    }
    if let Some(path) = find_cycle(&succs) {
        return Err(GraphError::CycleDetected { path });
    }
    Ok(())
}

/// Depth-first search for a cycle; returns the witness path with its first
/// node repeated at the end.
fn find_cycle(succs: &[Vec<NodeId>]) -> Option<Vec<NodeId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        White,
        Grey,
        Black,
    }
    let n = succs.len();
    let mut mark = vec![Mark::White; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if mark[root] != Mark::White {
            continue;
        }
        mark[root] = Mark::Grey;
        stack.push((root, 0));
        while let Some(&mut (u, ref mut next)) = stack.last_mut() {
            if let Some(&v) = succs[u].get(*next) {
                *next += 1;
                match mark[v.index()] {
                    Mark::White => {
                        mark[v.index()] = Mark::Grey;
                        stack.push((v.index(), 0));
                    }
                    Mark::Grey => {
                        let start = stack.iter().position(|&(w, _)| w == v.index()).unwrap();
                        let mut path: Vec<NodeId> =
                            stack[start..].iter().map(|&(w, _)| NodeId::from_index(w)).collect();
                        path.push(v);
                        return Some(path);
                    }
                    Mark::Black => {}
                }
            } else {
                mark[u] = Mark::Black;
                stack.pop();
            }
        }
    }
    None
}

/// A validated dependence DAG with precomputed adjacency.
#[derive(Clone, Debug)]
pub struct DepGraph {
    name: String,
    nodes: Vec<Node>,
    data_edges: Vec<Edge>,
    order_edges: Vec<Edge>,
    data_sources: Vec<Vec<NodeId>>,
    data_consumers: Vec<Vec<NodeId>>,
    // union of both edge kinds, deduplicated
    preds: Vec<Vec<NodeId>>,
    succs: Vec<Vec<NodeId>>,
}

impl PartialEq for DepGraph {
    fn eq(&self, other: &Self) -> bool {
        let canon = |edges: &[Edge]| {
            let mut e = edges.to_vec();
            e.sort_unstable();
            e
        };
        self.nodes == other.nodes
            && canon(&self.data_edges) == canon(&other.data_edges)
            && canon(&self.order_edges) == canon(&other.order_edges)
    }
}

impl Eq for DepGraph {}

impl DepGraph {
    pub fn new(nodes: Vec<Node>, data_edges: Vec<Edge>, order_edges: Vec<Edge>) -> Result<Self, GraphError> {
        validate_graph(&nodes, &data_edges, &order_edges)?;
        let n = nodes.len();
        let mut data_sources = vec![Vec::new(); n];
        let mut data_consumers = vec![Vec::new(); n];
        for &(a, b) in &data_edges {
            data_consumers[a.index()].push(b);
            data_sources[b.index()].push(a);
        }
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for &(a, b) in data_edges.iter().chain(&order_edges) {
            succs[a.index()].push(b);
            preds[b.index()].push(a);
        }
        for list in data_sources.iter_mut().chain(&mut data_consumers).chain(&mut preds).chain(&mut succs) {
            list.sort_unstable();
            list.dedup();
        }
        Ok(DepGraph { name: String::new(), nodes, data_edges, order_edges, data_sources, data_consumers, preds, succs })
    }

    /// Builds a graph whose nodes are numbered by position, from per-node sizes.
    pub fn from_sizes(sizes: &[u32], data_edges: &[(usize, usize)], order_edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let nodes = sizes.iter().enumerate().map(|(i, &s)| Node::new(i, s)).collect();
        let conv = |edges: &[(usize, usize)]| {
            edges.iter().map(|&(a, b)| (NodeId::from_index(a), NodeId::from_index(b))).collect()
        };
        DepGraph::new(nodes, conv(data_edges), conv(order_edges))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_ids(&self) -> impl ExactSizeIterator<Item = NodeId> + Clone {
        (0..self.nodes.len()).map(NodeId::from_index)
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    #[inline]
    pub fn def_size(&self, id: NodeId) -> u32 {
        self.nodes[id.index()].def_size
    }

    pub fn data_edges(&self) -> &[Edge] {
        &self.data_edges
    }

    pub fn order_edges(&self) -> &[Edge] {
        &self.order_edges
    }

    /// Total number of edges of both kinds.
    pub fn edge_count(&self) -> usize {
        self.data_edges.len() + self.order_edges.len()
    }

    /// Producers whose values `id` reads.
    #[inline]
    pub fn data_sources(&self, id: NodeId) -> &[NodeId] {
        &self.data_sources[id.index()]
    }

    /// Consumers reading the value produced by `id`.
    #[inline]
    pub fn data_consumers(&self, id: NodeId) -> &[NodeId] {
        &self.data_consumers[id.index()]
    }

    #[inline]
    pub fn use_count(&self, id: NodeId) -> usize {
        self.data_consumers[id.index()].len()
    }

    /// Nodes that must execute before `id` (either edge kind).
    #[inline]
    pub fn preds(&self, id: NodeId) -> &[NodeId] {
        &self.preds[id.index()]
    }

    /// Nodes that must execute after `id` (either edge kind).
    #[inline]
    pub fn succs(&self, id: NodeId) -> &[NodeId] {
        &self.succs[id.index()]
    }

    /// A topological order over both edge kinds, smallest id first among ready nodes.
    pub fn topo_order(&self) -> Vec<NodeId> {
        let n = self.len();
        let mut indeg: Vec<usize> = (0..n).map(|i| self.preds[i].len()).collect();
        let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<NodeId>> =
            self.node_ids().filter(|id| indeg[id.index()] == 0).map(std::cmp::Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(std::cmp::Reverse(u)) = ready.pop() {
            order.push(u);
            for &v in self.succs(u) {
                indeg[v.index()] -= 1;
                if indeg[v.index()] == 0 {
                    ready.push(std::cmp::Reverse(v));
                }
            }
        }
        debug_assert_eq!(order.len(), n);
        order
    }

    /// Same graph with every def_size replaced by `f(id, old)`.
    pub fn map_sizes(&self, mut f: impl FnMut(NodeId, u32) -> u32) -> DepGraph {
        let mut g = self.clone();
        for node in &mut g.nodes {
            node.def_size = f(node.id, node.def_size);
        }
        g
    }
}
