//! Instruction scheduling for minimum peak register pressure.
//!
//! A basic block is modeled as a [`DepGraph`]. The crate provides
//!
//! * the pressure evaluator every other part treats as ground truth
//!   ([`schedule::evaluate_pressure`]);
//! * generalized Sethi-Ullman numbering and the optimal tree scheduler
//!   ([`sethi_ullman`]);
//! * bottom-up list-scheduling heuristics and a commit-if-better driver
//!   ([`heuristics`]);
//! * a boolean constraint model with a checker, an exact branch-and-bound
//!   search and an exhaustive oracle ([`exact`]);
//! * graph files and seeded synthetic corpora ([`corpus`]);
//! * a benchmark harness computing optimal-match, outlier and mean-ratio
//!   metrics ([`bench`]).

pub mod bench;
pub mod corpus;
pub mod exact;
pub mod graph;
pub mod heuristics;
pub mod schedule;
pub mod sethi_ullman;

pub use graph::{validate_graph, DepGraph, GraphError, Node, NodeId};
pub use schedule::{evaluate_pressure, is_valid_schedule, last_use_steps, LiveTs, PressureTrace, Schedule};
