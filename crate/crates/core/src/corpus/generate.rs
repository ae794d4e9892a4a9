//! Seeded synthetic graph families.
//!
//! Randomness comes from ChaCha8 seeded with `ChaCha8Rng::seed_from_u64(seed)`.
//! Derived draws are kept simple so other implementations can reproduce them:
//! `below(m) = next_u64() % m` and `chance(p) = (next_u64() >> 11) * 2^-53 < p`.
//! All def sizes are drawn first, node by node, then edges.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::graph::{DepGraph, Node, NodeId};

/// In-degree cap for random DAGs.
pub const MAX_RANDOM_IN_DEGREE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    RandomDag,
    RandomTree,
    Cluster,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    /// Used by `random_dag` and `random_tree`.
    pub node_count: usize,
    /// Probability of each forward edge, in (0, 1]. `random_dag` only.
    pub edge_density: f64,
    /// Chains per level. `cluster` only.
    pub width: usize,
    /// Coupled levels. `cluster` only.
    pub levels: usize,
    /// Inclusive bounds for def_size.
    pub size_range: (u32, u32),
    pub seed: u64,
}

impl GenSpec {
    pub fn random_dag(node_count: usize, edge_density: f64, seed: u64) -> Self {
        GenSpec { kind: GenKind::RandomDag, node_count, edge_density, width: 0, levels: 0, size_range: (1, 1), seed }
    }

    pub fn random_tree(node_count: usize, seed: u64) -> Self {
        GenSpec { kind: GenKind::RandomTree, node_count, edge_density: 0.0, width: 0, levels: 0, size_range: (1, 1), seed }
    }

    pub fn cluster(width: usize, levels: usize, seed: u64) -> Self {
        GenSpec { kind: GenKind::Cluster, node_count: 0, edge_density: 0.0, width, levels, size_range: (1, 1), seed }
    }

    pub fn with_sizes(mut self, lo: u32, hi: u32) -> Self {
        self.size_range = (lo, hi);
        self
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let bad = |msg: &str| Err(CorpusError::Spec(msg.to_string()));
        if self.size_range.0 > self.size_range.1 {
            return bad("size_range lower bound exceeds upper bound");
        }
        match self.kind {
            GenKind::RandomDag => {
                if self.node_count == 0 {
                    return bad("node_count must be positive");
                }
                if !(self.edge_density > 0.0 && self.edge_density <= 1.0) {
                    return bad("edge_density must lie in (0, 1]");
                }
            }
            GenKind::RandomTree => {
                if self.node_count == 0 {
                    return bad("node_count must be positive");
                }
            }
            GenKind::Cluster => {
                if self.width == 0 || self.levels == 0 {
                    return bad("width and levels must be positive");
                }
            }
        }
        Ok(())
    }

    /// Default document name for a generated graph.
    pub fn default_name(&self) -> String {
        match self.kind {
            GenKind::RandomDag => format!("dag-n{}-s{}", self.node_count, self.seed),
            GenKind::RandomTree => format!("tree-n{}-s{}", self.node_count, self.seed),
            GenKind::Cluster => format!("cluster-w{}-l{}-s{}", self.width, self.levels, self.seed),
        }
    }
}

struct Draw(ChaCha8Rng);

impl Draw {
    fn new(seed: u64) -> Self {
        Draw(ChaCha8Rng::seed_from_u64(seed))
    }

    fn below(&mut self, m: u64) -> u64 {
        self.0.next_u64() % m
    }

    fn chance(&mut self, p: f64) -> bool {
        ((self.0.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64) < p
    }

    fn sizes(&mut self, count: usize, (lo, hi): (u32, u32)) -> Vec<u32> {
        let span = (hi - lo) as u64 + 1;
        (0..count).map(|_| lo + self.below(span) as u32).collect()
    }
}

pub fn generate(spec: &GenSpec) -> Result<DepGraph, CorpusError> {
    spec.validate()?;
    let mut rng = Draw::new(spec.seed);
    let graph = match spec.kind {
        GenKind::RandomDag => random_dag(&mut rng, spec),
        GenKind::RandomTree => random_tree(&mut rng, spec),
        GenKind::Cluster => cluster(&mut rng, spec),
    };
    Ok(graph.with_name(spec.default_name()))
}

fn build(nodes: Vec<Node>, mut data: Vec<(usize, usize)>) -> DepGraph {
    data.sort_unstable();
    let data = data.into_iter().map(|(a, b)| (NodeId::from_index(a), NodeId::from_index(b))).collect();
    DepGraph::new(nodes, data, Vec::new()).expect("generators produce acyclic graphs")
}

fn random_dag(rng: &mut Draw, spec: &GenSpec) -> DepGraph {
    let n = spec.node_count;
    let sizes = rng.sizes(n, spec.size_range);
    let mut edges = Vec::new();
    for j in 0..n {
        let mut sources: Vec<usize> = (0..j).filter(|_| rng.chance(spec.edge_density)).collect();
        if sources.len() > MAX_RANDOM_IN_DEGREE {
            // partial Fisher-Yates: keep a uniform subset of the cap size
            for k in 0..MAX_RANDOM_IN_DEGREE {
                let pick = k + rng.below((sources.len() - k) as u64) as usize;
                sources.swap(k, pick);
            }
            sources.truncate(MAX_RANDOM_IN_DEGREE);
        }
        edges.extend(sources.into_iter().map(|i| (i, j)));
    }
    let nodes = sizes.into_iter().enumerate().map(|(i, s)| Node::new(i, s)).collect();
    build(nodes, edges)
}

/// Every node except the last has exactly one consumer with a larger id.
fn random_tree(rng: &mut Draw, spec: &GenSpec) -> DepGraph {
    let n = spec.node_count;
    let sizes = rng.sizes(n, spec.size_range);
    let edges = (0..n.saturating_sub(1))
        .map(|i| (i, i + 1 + rng.below((n - 1 - i) as u64) as usize))
        .collect();
    let nodes = sizes.into_iter().enumerate().map(|(i, s)| Node::new(i, s)).collect();
    build(nodes, edges)
}

/// Level `l` has coupler `u{l}` followed by chain nodes `c{l}.0 .. c{l}.{w-1}`.
/// Each chain node reads its coupler and the same chain one level up. Couplers
/// past the first read every previous-level chain output except chain 0's, so
/// a level can only start once most of the one above is done, while chain 0
/// stays free to run ahead.
fn cluster(rng: &mut Draw, spec: &GenSpec) -> DepGraph {
    let (w, levels) = (spec.width, spec.levels);
    let sizes = rng.sizes(levels * (w + 1), spec.size_range);
    let coupler = |level: usize| level * (w + 1);
    let chain = |level: usize, k: usize| level * (w + 1) + 1 + k;
    let mut edges = Vec::new();
    for level in 0..levels {
        for k in 0..w {
            edges.push((coupler(level), chain(level, k)));
            if level > 0 {
                edges.push((chain(level - 1, k), chain(level, k)));
                if k > 0 {
                    edges.push((chain(level - 1, k), coupler(level)));
                }
            }
        }
    }
    let nodes = sizes
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let (level, slot) = (i / (w + 1), i % (w + 1));
            let label = if slot == 0 { format!("u{level}") } else { format!("c{level}.{}", slot - 1) };
            Node::new(i, s).with_label(label)
        })
        .collect();
    build(nodes, edges)
}
