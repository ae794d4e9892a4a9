use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use minreg_core::bench::{emit_trace, render_table, run_corpus, summarize, CaseResult, CorpusOptions, MetricsReport};
use minreg_core::corpus::{generate, read_graph_file, write_graph, GenKind, GenSpec};
use minreg_core::exact::{check_assignment, encode, solve_exact_with_progress};
use minreg_core::heuristics::{drive_block_detailed, run_variant, HeuristicConfig, Variant};
use minreg_core::{evaluate_pressure, is_valid_schedule, DepGraph, NodeId, Schedule};

#[derive(Parser)]
#[command(name = "minreg", version, about = "Register-pressure-aware instruction scheduling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    #[value(alias = "random_dag")]
    RandomDag,
    #[value(alias = "random_tree")]
    RandomTree,
    Cluster,
}

impl From<KindArg> for GenKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::RandomDag => GenKind::RandomDag,
            KindArg::RandomTree => GenKind::RandomTree,
            KindArg::Cluster => GenKind::Cluster,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic graph.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 4)]
        width: usize,
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[arg(long, default_value_t = 10)]
        node_count: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        /// Inclusive def_size range, `lo..hi` or a single value.
        #[arg(long, default_value = "1", value_parser = parse_range)]
        sizes: (u32, u32),
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Schedule a graph with one heuristic.
    Schedule {
        #[arg(long, default_value = "cluster-rp")]
        heuristic: Variant,
        /// Route through the commit-if-better driver with this threshold.
        #[arg(long)]
        threshold: Option<u64>,
        /// Original order for the driver; defaults to the graph's topological order.
        #[arg(long, requires = "threshold")]
        original: Option<PathBuf>,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Find a minimum-peak schedule.
    Solve {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value = "60s", value_parser = humantime::parse_duration)]
        time_limit: Duration,
        /// Print incumbent improvements to stderr.
        #[arg(long)]
        verbose: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a schedule against the constraint model.
    Check {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Emit the constraint model as JSON.
    Encode {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run heuristics and the solver over a directory of graphs.
    Bench {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "su,su-rp,su-rp-adjust,cluster-rp,cluster-rp-adjust")]
        variants: Vec<Variant>,
        #[arg(long, default_value = "60s", value_parser = humantime::parse_duration)]
        time_limit: Duration,
        #[arg(long, default_value_t = 0)]
        min_nodes: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Per-step pressure of a schedule as CSV.
    Trace {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let parse = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi.trim_start_matches('='))?)),
        None => parse(s).map(|v| (v, v)),
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleFile {
    order: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_rp: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<u64>>,
}

#[derive(Serialize)]
struct BenchOutput<'a> {
    cases: &'a [CaseResult],
    report: &'a MetricsReport,
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            if !bytes.ends_with(b"\n") {
                out.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(output: Option<&Path>, value: &T) -> Result<()> {
    emit(output, serde_json::to_string_pretty(value)?.as_bytes())
}

fn load_graph(path: &Path) -> Result<DepGraph> {
    read_graph_file(path).with_context(|| format!("reading graph {}", path.display()))
}

fn load_schedule(path: &Path) -> Result<Schedule> {
    let text = fs::read_to_string(path).with_context(|| format!("reading schedule {}", path.display()))?;
    let file: ScheduleFile =
        serde_json::from_str(&text).with_context(|| format!("parsing schedule {}", path.display()))?;
    Ok(Schedule::new(file.order.into_iter().map(NodeId).collect()))
}

fn schedule_file(graph: &DepGraph, schedule: &Schedule) -> Result<ScheduleFile> {
    let trace = evaluate_pressure(graph, schedule)?;
    Ok(ScheduleFile {
        order: schedule.order.iter().map(|v| v.0).collect(),
        max_rp: Some(trace.max_rp),
        trace: Some(trace.per_step),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { kind, width, levels, node_count, density, sizes, seed, output } => {
            let spec = GenSpec {
                kind: kind.into(),
                node_count,
                edge_density: density,
                width,
                levels,
                size_range: sizes,
                seed,
            };
            let graph = generate(&spec)?;
            emit(output.as_deref(), &write_graph(&graph))?;
        }
        Command::Schedule { heuristic, threshold, original, input, output } => {
            let graph = load_graph(&input)?;
            let schedule = match threshold {
                None => run_variant(&graph, heuristic),
                Some(threshold) => {
                    let original = match original {
                        Some(path) => load_schedule(&path)?,
                        None => Schedule::new(graph.topo_order()),
                    };
                    let config = HeuristicConfig::new(heuristic).with_threshold(threshold);
                    let outcome = drive_block_detailed(&graph, &original, &config)?;
                    eprintln!("driver: {:?} ({} -> {})", outcome.choice, outcome.old_max_rp, outcome.new_max_rp);
                    outcome.schedule
                }
            };
            emit_json(output.as_deref(), &schedule_file(&graph, &schedule)?)?;
        }
        Command::Solve { input, time_limit, verbose, output } => {
            let graph = load_graph(&input)?;
            let result = solve_exact_with_progress(&graph, time_limit, |p| {
                if verbose {
                    eprintln!("incumbent {} (bound {}, {} expanded)", p.incumbent, p.lower_bound, p.nodes_expanded);
                }
            });
            emit_json(output.as_deref(), &result)?;
        }
        Command::Check { input, schedule } => {
            let graph = load_graph(&input)?;
            let schedule = load_schedule(&schedule)?;
            let system = encode(&graph);
            let report = check_assignment(&system, &schedule)?;
            let valid = is_valid_schedule(&graph, &schedule.order);
            for &idx in &report.violations {
                println!("violated #{idx}: {}", serde_json::to_string(&system.constraints[idx])?);
            }
            println!(
                "{}: {} violation(s), Z = {}",
                if valid { "valid" } else { "invalid" },
                report.violations.len(),
                report.z
            );
            if !report.is_feasible() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Encode { input, output } => {
            let graph = load_graph(&input)?;
            emit_json(output.as_deref(), &encode(&graph))?;
        }
        Command::Bench { corpus, variants, time_limit, min_nodes, output } => {
            if variants.is_empty() {
                bail!("no variants selected");
            }
            let options = CorpusOptions { variants, time_limit, min_nodes };
            let cases = run_corpus(&corpus, &options)?;
            let report = summarize(&cases);
            eprint!("{}", render_table(&report));
            emit_json(output.as_deref(), &BenchOutput { cases: &cases, report: &report })?;
            let failed: Vec<_> = cases.iter().filter(|c| c.error.is_some()).collect();
            for c in &failed {
                eprintln!("error in {}: {}", c.name, c.error.as_deref().unwrap_or_default());
            }
            if !failed.is_empty() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Trace { input, schedule, output } => {
            let graph = load_graph(&input)?;
            let schedule = load_schedule(&schedule)?;
            let mut buf = Vec::new();
            emit_trace(&graph, &schedule, &mut buf)?;
            emit(output.as_deref(), &buf)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
