use crate::graph::DepGraph;
use crate::schedule::{evaluate_pressure, Schedule, ScheduleError};

use super::{run_variant_with, HeuristicConfig, Variant};

/// Which sequence the driver committed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriveChoice {
    /// Peak at or below the threshold.
    BelowThreshold,
    /// Peak only at the first or last step; reordering cannot lower it.
    BoundaryPeak,
    /// Neither heuristic strictly improved the peak.
    NoImprovement,
    /// The configured heuristic's schedule was committed.
    Heuristic(Variant),
    /// Clustering did not improve, plain SU did.
    FallbackSu,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DriveOutcome {
    pub schedule: Schedule,
    pub choice: DriveChoice,
    pub old_max_rp: u64,
    pub new_max_rp: u64,
}

/// Commit-if-better wrapper around a heuristic: the heuristic's schedule is
/// used only when its peak is strictly below the original's.
pub fn drive_block(graph: &DepGraph, original: &Schedule, config: &HeuristicConfig) -> Result<Schedule, ScheduleError> {
    drive_block_detailed(graph, original, config).map(|o| o.schedule)
}

pub fn drive_block_detailed(
    graph: &DepGraph,
    original: &Schedule,
    config: &HeuristicConfig,
) -> Result<DriveOutcome, ScheduleError> {
    let trace = evaluate_pressure(graph, original)?;
    let old = trace.max_rp;
    let keep = |choice| DriveOutcome { schedule: original.clone(), choice, old_max_rp: old, new_max_rp: old };
    if old <= config.threshold {
        return Ok(keep(DriveChoice::BelowThreshold));
    }
    let last = trace.per_step.len();
    if trace.peak_steps().all(|t| t == 1 || t == last) {
        return Ok(keep(DriveChoice::BoundaryPeak));
    }

    let mut attempts = vec![(config.variant, DriveChoice::Heuristic(config.variant))];
    if config.variant.is_cluster() {
        attempts.push((Variant::Su, DriveChoice::FallbackSu));
    }
    for (variant, choice) in attempts {
        let candidate = run_variant_with(graph, variant, config.tie_break);
        let new = evaluate_pressure(graph, &candidate)?.max_rp;
        if new < old {
            return Ok(DriveOutcome { schedule: candidate, choice, old_max_rp: old, new_max_rp: new });
        }
    }
    Ok(keep(DriveChoice::NoImprovement))
}
