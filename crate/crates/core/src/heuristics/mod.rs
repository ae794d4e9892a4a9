//! Bottom-up list schedulers and the commit-if-better driver.
//!
//! | variant             | queue priority        | RP-reduction | clustering |
//! |---------------------|-----------------------|--------------|------------|
//! | `su`                | SU number             | no           | no         |
//! | `su-rp`             | SU number             | yes          | no         |
//! | `su-rp-adjust`      | use-adjusted priority | yes          | no         |
//! | `cluster-rp`        | SU number             | yes          | yes        |
//! | `cluster-rp-adjust` | use-adjusted priority | yes          | yes        |

mod cluster;
mod driver;
mod list;
mod state;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::DepGraph;
use crate::schedule::Schedule;

pub use cluster::{find_unblocker, form_cluster, schedule_cluster};
pub use driver::{drive_block, drive_block_detailed, DriveChoice, DriveOutcome};
pub use list::{schedule_su, schedule_su_rp};
pub use state::{rp_delta, NodeStatus, ReadyKey, SchedulerEvent, SchedulerState};

/// Default peak below which the driver leaves a block alone.
pub const DEFAULT_THRESHOLD: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Su,
    SuRp,
    SuRpAdjust,
    ClusterRp,
    ClusterRpAdjust,
}

impl Variant {
    pub const ALL: [Variant; 5] =
        [Variant::Su, Variant::SuRp, Variant::SuRpAdjust, Variant::ClusterRp, Variant::ClusterRpAdjust];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Su => "su",
            Variant::SuRp => "su-rp",
            Variant::SuRpAdjust => "su-rp-adjust",
            Variant::ClusterRp => "cluster-rp",
            Variant::ClusterRpAdjust => "cluster-rp-adjust",
        }
    }

    pub fn is_cluster(self) -> bool {
        matches!(self, Variant::ClusterRp | Variant::ClusterRpAdjust)
    }

    pub fn adjusts(self) -> bool {
        matches!(self, Variant::SuRpAdjust | Variant::ClusterRpAdjust)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().replace('_', "-");
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == norm)
            .ok_or_else(|| format!("unknown heuristic `{s}` (expected one of su, su-rp, su-rp-adjust, cluster-rp, cluster-rp-adjust)"))
    }
}

/// Secondary ordering of ready nodes with equal priority. Node id is always
/// the final key.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// More data consumers first.
    #[default]
    UsesThenId,
    IdOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicConfig {
    pub variant: Variant,
    pub tie_break: TieBreak,
    /// Driver threshold: blocks whose peak is at most this are left alone.
    pub threshold: u64,
}

impl HeuristicConfig {
    pub fn new(variant: Variant) -> Self {
        HeuristicConfig { variant, tie_break: TieBreak::default(), threshold: DEFAULT_THRESHOLD }
    }

    pub fn with_threshold(mut self, threshold: u64) -> Self {
        self.threshold = threshold;
        self
    }
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig::new(Variant::ClusterRp)
    }
}

/// Runs one heuristic with the default tie-break.
pub fn run_variant(graph: &DepGraph, variant: Variant) -> Schedule {
    run_variant_with(graph, variant, TieBreak::default())
}

pub fn run_variant_with(graph: &DepGraph, variant: Variant, tie_break: TieBreak) -> Schedule {
    run_traced(graph, variant, tie_break, None)
}

/// Runs one heuristic, appending scheduler events to `events` when given.
pub fn run_traced(
    graph: &DepGraph,
    variant: Variant,
    tie_break: TieBreak,
    events: Option<&mut Vec<SchedulerEvent>>,
) -> Schedule {
    match variant {
        Variant::Su => list::list_schedule(graph, false, false, tie_break, events),
        Variant::SuRp | Variant::SuRpAdjust => list::list_schedule(graph, true, variant.adjusts(), tie_break, events),
        Variant::ClusterRp | Variant::ClusterRpAdjust => {
            cluster::cluster_schedule(graph, variant.adjusts(), tie_break, events)
        }
    }
}
