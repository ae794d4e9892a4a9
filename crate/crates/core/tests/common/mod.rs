//! Independent oracles and graph strategies shared by the integration tests.
#![allow(dead_code)]

use minreg_core::corpus::{generate, GenSpec};
use minreg_core::{DepGraph, NodeId, Schedule};
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A random DAG with `n` in `nodes`, any density, sizes in `1..=max_size`.
pub fn dag(nodes: std::ops::RangeInclusive<usize>, max_size: u32) -> impl Strategy<Value = DepGraph> {
    (nodes, 1u32..=9, 1..=max_size, any::<u64>()).prop_map(|(n, tenths, hi, seed)| {
        generate(&GenSpec::random_dag(n, tenths as f64 / 10.0, seed).with_sizes(1, hi)).unwrap()
    })
}

/// A DAG that may also carry order edges, mirroring a random subset of
/// forward pairs.
pub fn dag_with_order(nodes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = DepGraph> {
    (dag(nodes, 3), any::<u64>()).prop_map(|(g, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = g.len();
        let data: Vec<(usize, usize)> = g.data_edges().iter().map(|&(a, b)| (a.index(), b.index())).collect();
        let order: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|p| !data.contains(p))
            .filter(|_| rng.next_u64() % 8 == 0)
            .collect();
        let sizes: Vec<u32> = g.nodes().iter().map(|nd| nd.def_size).collect();
        DepGraph::from_sizes(&sizes, &data, &order).unwrap()
    })
}

/// Random topological order (uniform choice among ready nodes at each step).
pub fn random_topo(g: &DepGraph, seed: u64) -> Schedule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.len();
    let mut pending: Vec<usize> = g.node_ids().map(|v| g.preds(v).len()).collect();
    let mut ready: Vec<NodeId> = g.node_ids().filter(|v| pending[v.index()] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while !ready.is_empty() {
        let pick = ready.swap_remove((rng.next_u64() % ready.len() as u64) as usize);
        order.push(pick);
        for &s in g.succs(pick) {
            pending[s.index()] -= 1;
            if pending[s.index()] == 0 {
                ready.push(s);
            }
        }
    }
    Schedule::new(order)
}

/// Random permutation of all nodes, topological or not.
pub fn random_permutation(n: usize, seed: u64) -> Schedule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, (rng.next_u64() % (i as u64 + 1)) as usize);
    }
    Schedule::from_indices(&order)
}

/// `live[i][t-1]` straight from the definition: produced before `t`, last
/// consumer at or after `t`.
pub fn live_matrix(g: &DepGraph, s: &Schedule) -> Vec<Vec<bool>> {
    let n = g.len();
    let mut pos = vec![0usize; n];
    for (k, v) in s.order.iter().enumerate() {
        pos[v.index()] = k + 1;
    }
    (0..n)
        .map(|i| {
            let last = g.data_consumers(NodeId::from_index(i)).iter().map(|c| pos[c.index()]).max();
            (1..=n).map(|t| last.is_some_and(|last| pos[i] < t && t <= last)).collect()
        })
        .collect()
}

pub fn direct_per_step(g: &DepGraph, s: &Schedule) -> Vec<u64> {
    let live = live_matrix(g, s);
    (0..g.len())
        .map(|t| (0..g.len()).filter(|&i| live[i][t]).map(|i| g.def_size(NodeId::from_index(i)) as u64).sum())
        .collect()
}

/// Minimum peak over all topological orders by dynamic programming over
/// placed sets. Up to 20 nodes.
pub fn subset_dp_optimum(g: &DepGraph) -> u64 {
    let n = g.len();
    assert!(n <= 20);
    if n == 0 {
        return 0;
    }
    let preds: Vec<u32> =
        g.node_ids().map(|v| g.preds(v).iter().fold(0u32, |m, p| m | 1 << p.index())).collect();
    let consumers: Vec<u32> =
        g.node_ids().map(|v| g.data_consumers(v).iter().fold(0u32, |m, c| m | 1 << c.index())).collect();
    let full = (1u32 << n) - 1;
    let mut best = vec![u64::MAX; 1 << n];
    best[0] = 0;
    for set in 0..=full {
        let here = best[set as usize];
        if here == u64::MAX || set == full {
            continue;
        }
        let live: u64 = (0..n)
            .filter(|&i| set >> i & 1 == 1 && consumers[i] & !set != 0)
            .map(|i| g.def_size(NodeId::from_index(i)) as u64)
            .sum();
        let peak = here.max(live);
        for v in 0..n {
            if set >> v & 1 == 0 && preds[v] & !set == 0 {
                let next = (set | 1 << v) as usize;
                best[next] = best[next].min(peak);
            }
        }
    }
    best[full as usize]
}
