//! Corpus runner, comparison metrics and pressure traces.
//!
//! For every case with a proven optimum, each heuristic is scored by three
//! numbers: how often it matches the optimum, how often it is an outlier
//! (at least 1.5 times the optimum), and the mean of heuristic/optimum.
//! Cases without a proven optimum are left out of all three.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{list_graph_files, read_graph_file, CorpusError};
use crate::exact::{solve_exact, SolveStatus};
use crate::graph::DepGraph;
use crate::heuristics::{run_variant, Variant};
use crate::schedule::{evaluate_pressure, Schedule, ScheduleError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Clone, Debug)]
pub struct CorpusOptions {
    pub variants: Vec<Variant>,
    pub time_limit: Duration,
    /// Graphs with fewer nodes are skipped entirely.
    pub min_nodes: usize,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions { variants: Variant::ALL.to_vec(), time_limit: Duration::from_secs(60), min_nodes: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub name: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub optimal_max_rp: Option<u64>,
    pub solver_status: Option<SolveStatus>,
    pub per_variant_max_rp: BTreeMap<Variant, u64>,
    /// Wall-clock milliseconds per variant.
    pub runtimes_ms: BTreeMap<Variant, f64>,
    pub error: Option<String>,
}

impl CaseResult {
    fn failed(name: String, error: String) -> Self {
        CaseResult {
            name,
            node_count: 0,
            edge_count: 0,
            optimal_max_rp: None,
            solver_status: None,
            per_variant_max_rp: BTreeMap::new(),
            runtimes_ms: BTreeMap::new(),
            error: Some(error),
        }
    }

    /// All edges over nodes; zero for an empty graph.
    pub fn edge_node_ratio(&self) -> BigRational {
        if self.node_count == 0 {
            return BigRational::zero();
        }
        BigRational::new(BigInt::from(self.edge_count), BigInt::from(self.node_count))
    }
}

/// Solves and schedules one graph.
pub fn run_case(name: &str, graph: &DepGraph, options: &CorpusOptions) -> CaseResult {
    let solved = solve_exact(graph, options.time_limit);
    let mut result = CaseResult {
        name: name.to_string(),
        node_count: graph.len(),
        edge_count: graph.edge_count(),
        optimal_max_rp: solved.optimal_value(),
        solver_status: Some(solved.status),
        per_variant_max_rp: BTreeMap::new(),
        runtimes_ms: BTreeMap::new(),
        error: None,
    };
    for &variant in &options.variants {
        let start = Instant::now();
        let schedule = run_variant(graph, variant);
        let elapsed = start.elapsed();
        match evaluate_pressure(graph, &schedule) {
            Ok(trace) => {
                result.per_variant_max_rp.insert(variant, trace.max_rp);
                result.runtimes_ms.insert(variant, elapsed.as_secs_f64() * 1e3);
            }
            Err(e) => result.error = Some(format!("{variant}: {e}")),
        }
    }
    result
}

/// Runs every `*.json` graph in `dir`. Per-case failures are recorded in the
/// case, never propagated; results are sorted by case name.
pub fn run_corpus(dir: &Path, options: &CorpusOptions) -> Result<Vec<CaseResult>, BenchError> {
    let files = list_graph_files(dir)?;
    let mut results: Vec<CaseResult> = files
        .par_iter()
        .filter_map(|path| {
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            match read_graph_file(path) {
                Ok(graph) if graph.len() < options.min_nodes => None,
                Ok(graph) => Some(run_case(&name, &graph, options)),
                Err(e) => Some(CaseResult::failed(name, e.to_string())),
            }
        })
        .collect();
    results.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(results)
}

/// A non-negative rational rounded half-up to three decimals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Milli(pub u64);

impl Milli {
    pub fn from_ratio(value: &BigRational) -> Self {
        let scaled = value * BigRational::from_integer(BigInt::from(2000)) + BigRational::from_integer(BigInt::from(1));
        let half = (scaled / BigRational::from_integer(BigInt::from(2))).floor();
        Milli(half.to_integer().to_u64().expect("ratio out of range"))
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

impl std::fmt::Display for Milli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{:03}", self.0 / 1000, self.0 % 1000)
    }
}

impl Serialize for Milli {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Milli {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        Ok(Milli((v * 1000.0).round() as u64))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupStats {
    pub cases: usize,
    pub mean_nodes: Option<Milli>,
    pub mean_edge_node_ratio: Option<Milli>,
}

impl SubgroupStats {
    fn of<'a>(cases: impl Iterator<Item = &'a CaseResult>) -> Self {
        let mut count = 0usize;
        let mut nodes = BigRational::zero();
        let mut ratio = BigRational::zero();
        for c in cases {
            count += 1;
            nodes += BigRational::from_integer(BigInt::from(c.node_count));
            ratio += c.edge_node_ratio();
        }
        let mean = |sum: BigRational| {
            (count > 0).then(|| Milli::from_ratio(&(sum / BigRational::from_integer(BigInt::from(count)))))
        };
        SubgroupStats { cases: count, mean_nodes: mean(nodes), mean_edge_node_ratio: mean(ratio) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantMetrics {
    pub optimal_matches: usize,
    pub outliers: usize,
    /// Mean of per-case heuristic/optimal; absent without scored cases.
    pub avg_ratio: Option<Milli>,
    pub matches: SubgroupStats,
    pub outlier_stats: SubgroupStats,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Cases with a proven optimum.
    pub total_cases: usize,
    /// Cases without a proven optimum or with an error.
    pub excluded_cases: usize,
    pub all: SubgroupStats,
    pub variants: BTreeMap<Variant, VariantMetrics>,
}

/// `heuristic / optimal`, with `0 / 0` read as an exact match.
pub fn case_ratio(heuristic: u64, optimal: u64) -> BigRational {
    if optimal == 0 {
        return BigRational::from_integer(BigInt::from(if heuristic == 0 { 1 } else { u64::MAX }));
    }
    BigRational::new(BigInt::from(heuristic), BigInt::from(optimal))
}

/// True when `heuristic >= 1.5 * optimal` and the heuristic missed the optimum.
pub fn is_outlier(heuristic: u64, optimal: u64) -> bool {
    heuristic > optimal && 2 * heuristic as u128 >= 3 * optimal as u128
}

pub fn summarize(results: &[CaseResult]) -> MetricsReport {
    let scored: Vec<&CaseResult> =
        results.iter().filter(|c| c.error.is_none() && c.optimal_max_rp.is_some()).collect();
    let variants: std::collections::BTreeSet<Variant> =
        scored.iter().flat_map(|c| c.per_variant_max_rp.keys().copied()).collect();
    let mut per_variant = BTreeMap::new();
    for variant in variants {
        let mut sum = BigRational::zero();
        let mut count = 0usize;
        let mut matches = Vec::new();
        let mut outliers = Vec::new();
        for &case in &scored {
            let (Some(&h), Some(opt)) = (case.per_variant_max_rp.get(&variant), case.optimal_max_rp) else {
                continue;
            };
            count += 1;
            sum += case_ratio(h, opt);
            if h == opt {
                matches.push(case);
            } else if is_outlier(h, opt) {
                outliers.push(case);
            }
        }
        let avg_ratio =
            (count > 0).then(|| Milli::from_ratio(&(sum / BigRational::from_integer(BigInt::from(count)))));
        per_variant.insert(
            variant,
            VariantMetrics {
                optimal_matches: matches.len(),
                outliers: outliers.len(),
                avg_ratio,
                matches: SubgroupStats::of(matches.into_iter()),
                outlier_stats: SubgroupStats::of(outliers.into_iter()),
            },
        );
    }
    MetricsReport {
        total_cases: scored.len(),
        excluded_cases: results.len() - scored.len(),
        all: SubgroupStats::of(scored.into_iter()),
        variants: per_variant,
    }
}

fn opt_milli(v: Option<Milli>) -> String {
    v.map(|m| m.to_string()).unwrap_or_else(|| "-".to_string())
}

/// Plain-text tables, one per variant, with the classic row labels.
pub fn render_table(report: &MetricsReport) -> String {
    let mut out = String::new();
    let header = format!("{:<52}{:>10}{:>22}{:>22}\n", "", "Num Cases", "Ave. Nodes Per Case", "Ave Edge:Node Ratio");
    for (variant, m) in &report.variants {
        out.push_str(&format!("Heuristic: {variant}\n"));
        out.push_str(&header);
        let row = |label: &str, s: &SubgroupStats| {
            format!(
                "{:<52}{:>10}{:>22}{:>22}\n",
                label,
                s.cases,
                opt_milli(s.mean_nodes),
                opt_milli(s.mean_edge_node_ratio)
            )
        };
        out.push_str(&row("Total Number of DAGs", &report.all));
        out.push_str(&row("Cases that MaxRP by LS == Optimal MaxRP", &m.matches));
        out.push_str(&row("Cases that MaxRP by LS >= 1.5 * Optimal MaxRP", &m.outlier_stats));
        out.push_str(&format!("{:<52}{:>10}\n\n", "Average ratio of MaxRP by LS over Optimal MaxRP", opt_milli(m.avg_ratio)));
    }
    if report.excluded_cases > 0 {
        out.push_str(&format!("Excluded (no proven optimum or error): {}\n", report.excluded_cases));
    }
    out
}

/// Writes `step,rp` CSV rows for a schedule; returns the number of bytes written.
pub fn emit_trace(graph: &DepGraph, schedule: &Schedule, out: &mut impl Write) -> Result<usize, BenchError> {
    let trace = evaluate_pressure(graph, schedule)?;
    let mut text = String::from("step,rp\n");
    for (k, rp) in trace.per_step.iter().enumerate() {
        text.push_str(&format!("{},{}\n", k + 1, rp));
    }
    out.write_all(text.as_bytes())?;
    Ok(text.len())
}
