//! Boolean matrix formulation of peak-pressure minimization.
//!
//! Variables, for nodes `i` and 1-based steps `k` in `1..=N`:
//!
//! * `x[i][k]`: node `i` executes at step `k`;
//! * `ox[i][k]`: suffix-or of row `x[i]` from column `k` onward, i.e. node `i`
//!   executes at step `k` or later;
//! * `l[i][k]`: the output of `i` is live at step `k`;
//! * `Z`: integer bound on the pressure of every step, minimized.
//!
//! Constraints:
//!
//! ```text
//! sum_i x[i][k] == 1                         (each step)
//! sum_k x[i][k] == 1                         (each node)
//! sum_k (x[i][k] - x[j][k]) * k < 0          (each edge i -> j, either kind)
//! ox[i][N] = x[i][N];  ox[i][k] = x[i][k] or ox[i][k+1]
//! l[i][k] = or_{j in consumers(i)} (ox[j][k] - ox[i][k] == 1)
//! Z >= sum_i l[i][k] * size(i)               (each step)
//! minimize Z
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DepGraph, NodeId};
use crate::schedule::Schedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    X,
    Ox,
    L,
    Z,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    /// `sum(vars) == 1` over one row of `x`.
    RowSum { node: usize, vars: Vec<VarId> },
    /// `sum(vars) == 1` over one column of `x`.
    ColumnSum { step: usize, vars: Vec<VarId> },
    /// `sum(coef * var) < 0`, the dot-product form of `t_before < t_after`.
    Ordering { before: usize, after: usize, terms: Vec<(VarId, i64)> },
    /// `target = or(operands)`.
    SuffixOr { target: VarId, operands: Vec<VarId> },
    /// `target = or over (a, b) of (a - b == 1)`; false when `pairs` is empty.
    LiveBit { target: VarId, pairs: Vec<(VarId, VarId)> },
    /// `Z >= sum(size * var)` at one step.
    Pressure { step: usize, terms: Vec<(VarId, u64)> },
}

impl Constraint {
    pub fn kind(&self) -> &'static str {
        match self {
            Constraint::RowSum { .. } => "row_sum",
            Constraint::ColumnSum { .. } => "column_sum",
            Constraint::Ordering { .. } => "ordering",
            Constraint::SuffixOr { .. } => "suffix_or",
            Constraint::LiveBit { .. } => "live_bit",
            Constraint::Pressure { .. } => "pressure",
        }
    }

    fn is_satisfied(&self, values: &[i64], z_value: i64) -> bool {
        let v = |id: &VarId| values[id.0 as usize];
        match self {
            Constraint::RowSum { vars, .. } | Constraint::ColumnSum { vars, .. } => {
                vars.iter().map(v).sum::<i64>() == 1
            }
            Constraint::Ordering { terms, .. } => terms.iter().map(|(id, c)| v(id) * c).sum::<i64>() < 0,
            Constraint::SuffixOr { target, operands } => v(target) == operands.iter().any(|o| v(o) == 1) as i64,
            Constraint::LiveBit { target, pairs } => v(target) == pairs.iter().any(|(a, b)| v(a) - v(b) == 1) as i64,
            Constraint::Pressure { terms, .. } => z_value >= terms.iter().map(|(id, s)| v(id) * *s as i64).sum::<i64>(),
        }
    }
}

/// The complete model for one graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    pub n: usize,
    pub sizes: Vec<u32>,
    pub constraints: Vec<Constraint>,
    /// Always `Z`; the objective is to minimize it.
    pub objective: VarId,
}

impl ConstraintSystem {
    /// `k` is 1-based.
    pub fn x(&self, i: usize, k: usize) -> VarId {
        var(self.n, 0, i, k)
    }

    pub fn ox(&self, i: usize, k: usize) -> VarId {
        var(self.n, 1, i, k)
    }

    pub fn l(&self, i: usize, k: usize) -> VarId {
        var(self.n, 2, i, k)
    }

    pub fn z(&self) -> VarId {
        VarId((3 * self.n * self.n) as u32)
    }

    pub fn var_count(&self) -> usize {
        3 * self.n * self.n + 1
    }

    /// Matrix, row and 1-based step of a variable.
    pub fn describe(&self, id: VarId) -> (VarKind, usize, usize) {
        let idx = id.0 as usize;
        let nn = self.n * self.n;
        if idx == 3 * nn {
            return (VarKind::Z, 0, 0);
        }
        let kind = [VarKind::X, VarKind::Ox, VarKind::L][idx / nn];
        let rem = idx % nn;
        (kind, rem / self.n, rem % self.n + 1)
    }

    pub fn count(&self, kind: &str) -> usize {
        self.constraints.iter().filter(|c| c.kind() == kind).count()
    }
}

fn var(n: usize, matrix: usize, i: usize, k: usize) -> VarId {
    debug_assert!(i < n && (1..=n).contains(&k));
    VarId((matrix * n * n + i * n + (k - 1)) as u32)
}

pub fn encode(graph: &DepGraph) -> ConstraintSystem {
    let n = graph.len();
    let mut sys = ConstraintSystem {
        n,
        sizes: graph.nodes().iter().map(|nd| nd.def_size).collect(),
        constraints: Vec::new(),
        objective: VarId((3 * n * n) as u32),
    };
    let mut cs = Vec::new();
    for i in 0..n {
        cs.push(Constraint::RowSum { node: i, vars: (1..=n).map(|k| sys.x(i, k)).collect() });
    }
    for k in 1..=n {
        cs.push(Constraint::ColumnSum { step: k, vars: (0..n).map(|i| sys.x(i, k)).collect() });
    }
    for &(a, b) in graph.data_edges().iter().chain(graph.order_edges()) {
        let (i, j) = (a.index(), b.index());
        let mut terms = Vec::with_capacity(2 * n);
        for k in 1..=n {
            terms.push((sys.x(i, k), k as i64));
            terms.push((sys.x(j, k), -(k as i64)));
        }
        cs.push(Constraint::Ordering { before: i, after: j, terms });
    }
    // emitted from the last column backwards so each definition only reads earlier ones
    for i in 0..n {
        for k in (1..=n).rev() {
            let mut operands = vec![sys.x(i, k)];
            if k < n {
                operands.push(sys.ox(i, k + 1));
            }
            cs.push(Constraint::SuffixOr { target: sys.ox(i, k), operands });
        }
    }
    for i in 0..n {
        let consumers = graph.data_consumers(NodeId::from_index(i));
        for k in 1..=n {
            let pairs = consumers.iter().map(|j| (sys.ox(j.index(), k), sys.ox(i, k))).collect();
            cs.push(Constraint::LiveBit { target: sys.l(i, k), pairs });
        }
    }
    for k in 1..=n {
        let terms = (0..n).map(|i| (sys.l(i, k), sys.sizes[i] as u64)).collect();
        cs.push(Constraint::Pressure { step: k, terms });
    }
    sys.constraints = cs;
    sys
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("schedule has {found} entries, model has {expected} steps")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("schedule names node {0}, which the model does not have")]
    UnknownNode(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    /// Indices into `ConstraintSystem::constraints`.
    pub violations: Vec<usize>,
    /// Largest per-step pressure under the derived live bits.
    pub z: u64,
    /// Every variable's value, indexed by [`VarId`].
    pub values: Vec<i64>,
}

impl CheckReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Instantiates the model from a schedule and lists the violated constraints.
///
/// `x` comes from the schedule; `ox` and `l` are derived by evaluating their
/// defining constraints in emission order; `Z` is the largest pressure sum.
pub fn check_assignment(system: &ConstraintSystem, schedule: &Schedule) -> Result<CheckReport, CheckError> {
    let n = system.n;
    if schedule.len() != n {
        return Err(CheckError::ShapeMismatch { expected: n, found: schedule.len() });
    }
    let mut values = vec![0i64; system.var_count()];
    for (k0, &id) in schedule.order.iter().enumerate() {
        if id.index() >= n {
            return Err(CheckError::UnknownNode(id));
        }
        values[system.x(id.index(), k0 + 1).0 as usize] = 1;
    }
    let mut z = 0i64;
    for c in &system.constraints {
        match c {
            Constraint::SuffixOr { target, operands } => {
                values[target.0 as usize] = operands.iter().any(|o| values[o.0 as usize] == 1) as i64;
            }
            Constraint::LiveBit { target, pairs } => {
                values[target.0 as usize] =
                    pairs.iter().any(|(a, b)| values[a.0 as usize] - values[b.0 as usize] == 1) as i64;
            }
            Constraint::Pressure { terms, .. } => {
                z = z.max(terms.iter().map(|(id, s)| values[id.0 as usize] * *s as i64).sum());
            }
            _ => {}
        }
    }
    values[system.z().0 as usize] = z;
    let violations = system
        .constraints
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_satisfied(&values, z))
        .map(|(idx, _)| idx)
        .collect();
    Ok(CheckReport { violations, z: z as u64, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diamond() -> DepGraph {
        DepGraph::from_sizes(&[1; 4], &[(0, 1), (0, 2), (1, 3), (2, 3)], &[]).unwrap()
    }

    #[test]
    fn single_node_model() {
        let g = DepGraph::from_sizes(&[2], &[], &[]).unwrap();
        let sys = encode(&g);
        assert_eq!(sys.count("row_sum"), 1);
        assert_eq!(sys.count("column_sum"), 1);
        assert_eq!(sys.count("ordering"), 0);
        assert_eq!(sys.count("pressure"), 1);
        let report = check_assignment(&sys, &Schedule::from_indices(&[0])).unwrap();
        assert!(report.is_feasible());
        assert_eq!(report.z, 0);
    }

    #[test]
    fn chain_counts() {
        let g = DepGraph::from_sizes(&[1; 3], &[(0, 1), (1, 2)], &[]).unwrap();
        let sys = encode(&g);
        assert_eq!(sys.count("ordering"), 2);
        assert_eq!(sys.count("pressure"), 3);
        assert_eq!(sys.count("suffix_or"), 9);
        assert_eq!(sys.count("live_bit"), 9);
    }

    #[test]
    fn diamond_structure() {
        let sys = encode(&diamond());
        assert_eq!(sys.count("ordering"), 4);
        let live_a = sys
            .constraints
            .iter()
            .find(|c| matches!(c, Constraint::LiveBit { target, .. } if *target == sys.l(0, 2)))
            .unwrap();
        match live_a {
            Constraint::LiveBit { pairs, .. } => {
                assert_eq!(pairs, &vec![(sys.ox(1, 2), sys.ox(0, 2)), (sys.ox(2, 2), sys.ox(0, 2))]);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn order_edges_constrain_without_liveness() {
        let g = DepGraph::from_sizes(&[4, 1], &[], &[(0, 1)]).unwrap();
        let sys = encode(&g);
        assert_eq!(sys.count("ordering"), 1);
        let r = check_assignment(&sys, &Schedule::from_indices(&[0, 1])).unwrap();
        assert!(r.is_feasible());
        assert_eq!(r.z, 0);
        let r = check_assignment(&sys, &Schedule::from_indices(&[1, 0])).unwrap();
        assert_eq!(r.violations.len(), 1);
    }

    #[test]
    fn valid_diamond_schedule() {
        let sys = encode(&diamond());
        let r = check_assignment(&sys, &Schedule::from_indices(&[0, 1, 2, 3])).unwrap();
        assert!(r.is_feasible());
        assert_eq!(r.z, 2);
    }

    #[test]
    fn invalid_diamond_schedule_reports_one_edge() {
        let sys = encode(&diamond());
        let r = check_assignment(&sys, &Schedule::from_indices(&[1, 0, 2, 3])).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(
            sys.constraints[r.violations[0]].kind(),
            "ordering"
        );
        assert!(matches!(sys.constraints[r.violations[0]], Constraint::Ordering { before: 0, after: 1, .. }));
    }

    #[test]
    fn non_permutation_breaks_row_and_column() {
        let sys = encode(&diamond());
        let r = check_assignment(&sys, &Schedule::from_indices(&[0, 0, 2, 3])).unwrap();
        let kinds: Vec<_> = r.violations.iter().map(|&i| sys.constraints[i].kind()).collect();
        assert!(kinds.contains(&"row_sum"));
        assert!(!kinds.contains(&"column_sum"));
    }

    #[test]
    fn shape_mismatch() {
        let sys = encode(&diamond());
        assert_eq!(
            check_assignment(&sys, &Schedule::from_indices(&[0, 1])),
            Err(CheckError::ShapeMismatch { expected: 4, found: 2 })
        );
        assert_eq!(
            check_assignment(&sys, &Schedule::from_indices(&[0, 1, 2, 9])),
            Err(CheckError::UnknownNode(NodeId(9)))
        );
    }

    #[test]
    fn describe_inverts_layout() {
        let sys = encode(&diamond());
        assert_eq!(sys.describe(sys.x(2, 3)), (VarKind::X, 2, 3));
        assert_eq!(sys.describe(sys.ox(0, 4)), (VarKind::Ox, 0, 4));
        assert_eq!(sys.describe(sys.l(3, 1)), (VarKind::L, 3, 1));
        assert_eq!(sys.describe(sys.z()).0, VarKind::Z);
    }
}
