//! Command-line front end over the library: run detections, build synthetic
//! benchmarks, score results, and export subgraphs for rendering.
//!
//! Diagnostics go to standard error; data goes to files or standard output.
//! Exit codes: 0 success, 1 runtime error, 2 usage error, 3 when `detect`
//! finds no statistically significant subgraph.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use antibenford::benford::{BenfordModel, Digit, DigitHistogram};
use antibenford::dsp::greedy_peel;
use antibenford::error::{Error, Result};
use antibenford::evalkit::{
    digit_distribution_report, entropy_purity, f1, score_degree_histogram, BinningSpec,
    DetectionScore, PurityScore,
};
use antibenford::export::subgraph_dot;
use antibenford::pipeline::{
    detect_topk, global_stats, render_table, DetectionConfig, DetectionOutput, SolverKind,
};
use antibenford::scoring::{node_scores, reweight};
use antibenford::synthgen::{generate, PlantedGroundTruth, SynthSpec};
use antibenford::txgraph::{IngestConfig, LoadSummary, TransactionGraph};

#[derive(Parser)]
#[command(
    name = "antibenford",
    version,
    about = "Find dense transaction subgraphs whose amounts defy Benford's law"
)]
struct Cli {
    /// Worker threads for parallel phases (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect anomalous dense subgraphs in a transaction CSV.
    Detect(DetectArgs),
    /// Generate a synthetic benchmark graph with planted anomalies.
    Synth(SynthArgs),
    /// Score a detection report against ground truth or labels.
    Eval(EvalArgs),
    /// Export a detected subgraph as Graphviz DOT.
    Export(ExportArgs),
    /// Whole-graph digit statistics and score distributions.
    Stats(StatsArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Drop transactions with an amount below this.
    #[arg(long, default_value_t = 1.0)]
    min_value: f64,
    /// Single-character field delimiter ("\t" for tabs).
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    delimiter: u8,
    /// Keep self-loop transactions instead of dropping them.
    #[arg(long)]
    keep_self_loops: bool,
}

impl IngestArgs {
    fn config(&self) -> IngestConfig {
        IngestConfig {
            min_value: self.min_value,
            delimiter: self.delimiter,
            keep_self_loops: self.keep_self_loops,
        }
    }
}

fn parse_delimiter(s: &str) -> std::result::Result<u8, String> {
    if s == "\\t" {
        return Ok(b'\t');
    }
    match s.as_bytes() {
        [b] => Ok(*b),
        _ => Err(format!("delimiter must be a single character, got {s:?}")),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    /// One pass of greedy peeling (half-approximate, near-linear).
    Greedy,
    /// Repeated peeling with carried node loads; tighter on hard instances.
    GreedyIterated,
    /// Max-flow binary search; exact but only for small graphs.
    Exact,
}

#[derive(Args)]
struct DetectArgs {
    /// Transaction CSV: src,dst,value[,timestamp].
    #[arg(long, env = "ANTIBENFORD_INPUT")]
    input: PathBuf,
    /// Write the full detection report as JSON.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the digit-frequency comparison (Benford vs global vs ranks) as CSV.
    #[arg(long)]
    digit_csv: Option<PathBuf>,
    /// Write the first-round greedy peeling trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// How many disjoint subgraphs to extract at most.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Significance multiplier: report S only if psi(S) >= tau * psi(baseline).
    #[arg(long, default_value_t = 10.0)]
    tau: f64,
    #[arg(long, value_enum, default_value_t = SolverArg::Greedy)]
    solver: SolverArg,
    /// Peeling rounds for the iterated solver (implies --solver greedy-iterated).
    #[arg(long)]
    iterations: Option<usize>,
    /// Weight reweighted edges by their parallel-transaction count.
    #[arg(long)]
    multiplicity_weighting: bool,
    /// Compare every round against the whole-graph psi instead of the
    /// residual graph's.
    #[arg(long)]
    fixed_baseline: bool,
    #[command(flatten)]
    ingest: IngestArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// Where to write the generated transaction CSV.
    #[arg(long, env = "ANTIBENFORD_OUTPUT")]
    output: PathBuf,
    /// Where to write the planted ground-truth JSON.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    normal_clusters: usize,
    /// Nodes per normal cluster.
    #[arg(long, default_value_t = 80)]
    cluster_size: usize,
    /// Nodes per anomalous cluster.
    #[arg(long, default_value_t = 80)]
    anomalous_size: usize,
    /// Planted first digits, one anomalous cluster per digit.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1u8, 2, 3])]
    digits: Vec<u8>,
    /// Probability of each cross-cluster user-object edge.
    #[arg(long, default_value_t = 0.1)]
    cross_p: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct EvalArgs {
    /// Detection report JSON written by `detect --output`.
    #[arg(long, env = "ANTIBENFORD_REPORT")]
    report: PathBuf,
    /// Planted ground-truth JSON written by `synth --truth`.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// JSON object mapping node key to cluster label.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Transaction CSV the report was computed from.
    #[arg(long, env = "ANTIBENFORD_INPUT")]
    input: PathBuf,
    /// Detection report JSON.
    #[arg(long, env = "ANTIBENFORD_REPORT")]
    report: PathBuf,
    /// Which ranked subgraph to export.
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// DOT output path; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    ingest: IngestArgs,
}

#[derive(Args)]
struct StatsArgs {
    /// Transaction CSV: src,dst,value[,timestamp].
    #[arg(long, env = "ANTIBENFORD_INPUT")]
    input: PathBuf,
    /// Write Benford-vs-observed digit frequencies as CSV.
    #[arg(long)]
    digit_csv: Option<PathBuf>,
    /// Write the s(u)/deg(u) histogram as CSV.
    #[arg(long)]
    score_histogram: Option<PathBuf>,
    /// Bin count for --score-histogram.
    #[arg(long, default_value_t = 40)]
    bins: usize,
    /// Write per-node scores as JSON lines.
    #[arg(long)]
    scores: Option<PathBuf>,
    #[command(flatten)]
    ingest: IngestArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not size the thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Detect(args) => cmd_detect(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Export(args) => cmd_export(args),
        Command::Stats(args) => cmd_stats(args),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let stdout = io::stdout();
    let mut w = stdout.lock();
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

fn load(input: &Path, ingest: &IngestArgs) -> Result<(TransactionGraph, LoadSummary)> {
    let (graph, summary) = TransactionGraph::load_csv(input, &ingest.config())?;
    eprintln!(
        "loaded {} transactions over {} nodes ({} rows read, {} below min-value, {} self-loops dropped)",
        graph.transaction_count(),
        graph.node_count(),
        summary.rows_read,
        summary.dropped_below_min,
        summary.dropped_self_loops,
    );
    Ok((graph, summary))
}

fn cmd_detect(args: DetectArgs) -> Result<u8> {
    let solver = match (args.solver, args.iterations) {
        (SolverArg::Greedy, None) => SolverKind::Greedy,
        (SolverArg::Greedy | SolverArg::GreedyIterated, Some(t)) => SolverKind::GreedyIterated(t),
        (SolverArg::GreedyIterated, None) => SolverKind::GreedyIterated(8),
        (SolverArg::Exact, None) => SolverKind::Exact,
        (SolverArg::Exact, Some(_)) => {
            return Err(Error::InvalidParameter(
                "--iterations only applies to the greedy-iterated solver".into(),
            ))
        }
    };
    let config = DetectionConfig {
        k: args.k,
        tau: args.tau,
        solver,
        count_multiplicity: args.multiplicity_weighting,
        fixed_baseline: args.fixed_baseline,
    };
    config.validate()?;
    let (graph, _) = load(&args.input, &args.ingest)?;
    let output = detect_topk(&graph, &config)?;

    if let Some(path) = &args.trace {
        // Always the plain greedy order over the untouched graph, whatever
        // solver ran the extraction.
        let scores = node_scores(&graph, &BenfordModel::standard());
        let rg = reweight(&graph, &scores, args.multiplicity_weighting);
        let (_, trace) = greedy_peel(&rg)?;
        let f = BufWriter::new(File::create(path)?);
        trace.write_csv_with(f, |u| graph.keys()[u.index()].clone())?;
    }
    if let Some(path) = &args.digit_csv {
        let f = BufWriter::new(File::create(path)?);
        digit_distribution_report(&output.reports, &output.global).write_csv(f)?;
    }
    if let Some(path) = &args.output {
        write_json(path, &output)?;
    }

    print!("{}", render_table(&output));
    if output.reports.is_empty() {
        eprintln!("no statistically significant anomalous subgraph found");
        return Ok(3);
    }
    Ok(0)
}

fn cmd_synth(args: SynthArgs) -> Result<u8> {
    let digits = args
        .digits
        .iter()
        .map(|&d| Digit::new(d))
        .collect::<Result<Vec<_>>>()?;
    let spec = SynthSpec {
        normal_clusters: args.normal_clusters,
        normal_cluster_size: args.cluster_size,
        anomalous_sizes: vec![args.anomalous_size; digits.len()],
        planted_digits: digits,
        cross_p: args.cross_p,
        seed: args.seed,
    };
    let (graph, truth) = generate(&spec)?;
    let mut f = BufWriter::new(File::create(&args.output)?);
    graph.export_csv(&mut f)?;
    f.flush()?;
    if let Some(path) = &args.truth {
        truth.write_json(path)?;
    }
    eprintln!(
        "wrote {} transactions over {} nodes to {}",
        graph.transaction_count(),
        graph.node_count(),
        args.output.display(),
    );
    Ok(0)
}

#[derive(Serialize)]
struct RankPurity {
    rank: usize,
    #[serde(flatten)]
    purity: PurityScore,
}

#[derive(Serialize)]
struct EvalOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    detection: Option<DetectionScore>,
    #[serde(skip_serializing_if = "Option::is_none")]
    purity: Option<Vec<RankPurity>>,
}

fn cmd_eval(args: EvalArgs) -> Result<u8> {
    if args.truth.is_none() && args.labels.is_none() {
        return Err(Error::InvalidParameter(
            "eval needs --truth and/or --labels".into(),
        ));
    }
    let output: DetectionOutput = serde_json::from_reader(File::open(&args.report)?)?;
    let mut eval = EvalOutput {
        detection: None,
        purity: None,
    };
    if let Some(path) = &args.truth {
        let truth = PlantedGroundTruth::read_json(path)?;
        let detected: BTreeSet<String> = output
            .reports
            .iter()
            .flat_map(|r| r.nodes.iter().cloned())
            .collect();
        eval.detection = Some(f1(&detected, &truth.anomalous_union())?);
    }
    if let Some(path) = &args.labels {
        let labels: BTreeMap<String, String> = serde_json::from_reader(File::open(path)?)?;
        let mut ranks = Vec::new();
        for r in &output.reports {
            let nodes: BTreeSet<String> = r.nodes.iter().cloned().collect();
            ranks.push(RankPurity {
                rank: r.rank,
                purity: entropy_purity(&nodes, &labels)?,
            });
        }
        eval.purity = Some(ranks);
    }
    print_json(&eval)?;
    Ok(0)
}

fn cmd_export(args: ExportArgs) -> Result<u8> {
    let (graph, _) = load(&args.input, &args.ingest)?;
    let output: DetectionOutput = serde_json::from_reader(File::open(&args.report)?)?;
    let report = output
        .reports
        .iter()
        .find(|r| r.rank == args.rank)
        .ok_or(Error::UnknownRank(args.rank))?;
    let scores = node_scores(&graph, &BenfordModel::standard());
    let dot = subgraph_dot(&graph, &scores, report)?;
    match &args.output {
        Some(path) => std::fs::write(path, dot)?,
        None => print!("{dot}"),
    }
    Ok(0)
}

#[derive(Serialize)]
struct StatsOutput<'a> {
    load: &'a LoadSummary,
    nodes: usize,
    transactions: usize,
    distinct_edges: usize,
    chi2: f64,
    psi: f64,
    txn_density: f64,
    highly_suspicious: bool,
    digit_histogram: &'a DigitHistogram,
}

fn cmd_stats(args: StatsArgs) -> Result<u8> {
    let (graph, summary) = load(&args.input, &args.ingest)?;
    let global = global_stats(&graph)?;
    let table = node_scores(&graph, &BenfordModel::standard());
    if let Some(path) = &args.digit_csv {
        let f = BufWriter::new(File::create(path)?);
        digit_distribution_report(&[], &global).write_csv(f)?;
    }
    if let Some(path) = &args.score_histogram {
        let hist = score_degree_histogram(&table, &BinningSpec::Auto { bins: args.bins })?;
        let f = BufWriter::new(File::create(path)?);
        hist.write_csv(f)?;
    }
    if let Some(path) = &args.scores {
        let f = BufWriter::new(File::create(path)?);
        table.write_jsonl(&graph, f)?;
    }
    print_json(&StatsOutput {
        load: &summary,
        nodes: graph.node_count(),
        transactions: graph.transaction_count(),
        distinct_edges: graph.distinct_edge_count(),
        chi2: global.chi2,
        psi: global.psi,
        txn_density: global.density,
        highly_suspicious: global.highly_suspicious,
        digit_histogram: &global.digit_histogram,
    })?;
    Ok(0)
}
