//! End-to-end detection: score nodes, reweight, extract the densest
//! subgraph, test significance, and repeat on the residual graph for
//! disjoint top-k extraction.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::benford::{chi_square, BenfordModel, DigitHistogram};
use crate::dsp::{self, DensityResult};
use crate::error::{Error, Result};
use crate::scoring::{node_scores_masked, reweight_masked};
use crate::txgraph::{NodeId, TransactionGraph};

/// A subgraph below this average chi-square per node is never reported,
/// regardless of how quiet the global baseline is.
pub const PSI_SIGNIFICANCE_FLOOR: f64 = 1.0;

pub const DEFAULT_TAU: f64 = 10.0;

/// Which densest-subgraph solver drives extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Greedy,
    /// Load-balanced repeated peeling with the given iteration count.
    GreedyIterated(usize),
    Exact,
}

#[derive(Debug, Clone)]
pub struct DetectionConfig {
    /// Maximum number of disjoint subgraphs to extract.
    pub k: usize,
    /// Significance multiplier: a subgraph is reported only when its psi is
    /// at least `tau` times the baseline psi.
    pub tau: f64,
    pub solver: SolverKind,
    /// Weight edges by parallel-transaction multiplicity.
    pub count_multiplicity: bool,
    /// Keep comparing against the original whole-graph psi instead of the
    /// residual graph's psi after each extraction.
    pub fixed_baseline: bool,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            k: 1,
            tau: DEFAULT_TAU,
            solver: SolverKind::Greedy,
            count_multiplicity: false,
            fixed_baseline: false,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if self.tau.is_nan() || self.tau <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "tau must exceed 1, got {}",
                self.tau
            )));
        }
        if let SolverKind::GreedyIterated(0) = self.solver {
            return Err(Error::InvalidParameter(
                "iterated solver needs at least one iteration".into(),
            ));
        }
        Ok(())
    }
}

/// Everything reported about one subgraph (or, with `rank` 0, about the
/// whole graph).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgraphReport {
    pub rank: usize,
    /// External node keys, sorted.
    pub nodes: Vec<String>,
    pub node_count: usize,
    pub txn_count: u64,
    pub chi2: f64,
    pub psi: f64,
    /// Transactions per node, `txn_count / node_count`.
    pub density: f64,
    /// Density of the set in the score-reweighted graph.
    pub reweighted_density: f64,
    pub significant: bool,
    /// Deviation outruns even a per-transaction budget:
    /// `psi > txn_count / node_count`.
    pub highly_suspicious: bool,
    pub digit_histogram: DigitHistogram,
}

/// Result of a detection run: the global baseline plus ranked reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionOutput {
    pub global: SubgraphReport,
    pub reports: Vec<SubgraphReport>,
}

/// Whole-graph statistics; the baseline row of every report table.
pub fn global_stats(graph: &TransactionGraph) -> Result<SubgraphReport> {
    let model = BenfordModel::standard();
    global_report(graph, &model, DEFAULT_TAU, false)
}

fn global_report(
    graph: &TransactionGraph,
    model: &BenfordModel,
    tau: f64,
    count_multiplicity: bool,
) -> Result<SubgraphReport> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let hist: DigitHistogram = graph
        .transactions()
        .iter()
        .map(|t| t.first_digit)
        .collect();
    let chi = chi_square(&hist, model);
    let psi = chi.statistic / n as f64;
    let removed = vec![false; n];
    let scores = node_scores_masked(graph, model, &removed);
    let rg = reweight_masked(graph, &scores, &removed, count_multiplicity);
    let txn_count = graph.transaction_count() as u64;
    let density = txn_count as f64 / n as f64;
    Ok(SubgraphReport {
        rank: 0,
        // The whole-graph row never lists its members; node_count carries
        // the size.
        nodes: Vec::new(),
        node_count: n,
        txn_count,
        chi2: chi.statistic,
        psi,
        density,
        reweighted_density: rg.total_weight() / n as f64,
        // The global graph is its own baseline, so it can never clear a
        // tau > 1 threshold against itself.
        significant: psi >= tau * psi && psi >= PSI_SIGNIFICANCE_FLOOR,
        highly_suspicious: psi > density,
        digit_histogram: hist,
    })
}

fn masked_psi(graph: &TransactionGraph, removed: &[bool], alive: usize) -> f64 {
    if alive == 0 {
        return 0.0;
    }
    let model = BenfordModel::standard();
    let hist: DigitHistogram = graph
        .transactions()
        .iter()
        .filter(|t| !removed[t.src.index()] && !removed[t.dst.index()])
        .map(|t| t.first_digit)
        .collect();
    chi_square(&hist, &model).statistic / alive as f64
}

fn solve(rg: &crate::scoring::ReweightedGraph, solver: SolverKind) -> Result<DensityResult> {
    match solver {
        SolverKind::Greedy => Ok(dsp::greedy_peel(rg)?.0),
        SolverKind::GreedyIterated(t) => dsp::peel_iterations(rg, t),
        SolverKind::Exact => dsp::exact_densest(rg),
    }
}

struct RoundOutcome {
    ids: Vec<u32>,
    report: SubgraphReport,
}

fn detect_round(
    graph: &TransactionGraph,
    model: &BenfordModel,
    config: &DetectionConfig,
    removed: &[bool],
    baseline_psi: f64,
    rank: usize,
) -> Result<Option<RoundOutcome>> {
    let scores = node_scores_masked(graph, model, removed);
    let rg = reweight_masked(graph, &scores, removed, config.count_multiplicity);
    let dense = solve(&rg, config.solver)?;
    let ids: Vec<u32> = dense
        .nodes
        .iter()
        .map(|u| u.0)
        .filter(|&u| !removed[u as usize])
        .collect();
    if ids.is_empty() {
        return Ok(None);
    }
    let mut member = vec![false; graph.node_count()];
    for &u in &ids {
        member[u as usize] = true;
    }
    let mut hist = DigitHistogram::new();
    let mut txn_count = 0u64;
    for &t in &graph.induced_transaction_indices(&member) {
        hist.add(graph.transactions()[t as usize].first_digit);
        txn_count += 1;
    }
    let chi = chi_square(&hist, model);
    let node_count = ids.len();
    let psi = chi.statistic / node_count as f64;
    let significant = psi >= config.tau * baseline_psi && psi >= PSI_SIGNIFICANCE_FLOOR;
    if !significant {
        return Ok(None);
    }
    let density = txn_count as f64 / node_count as f64;
    let mut nodes: Vec<String> = ids
        .iter()
        .map(|&u| graph.keys()[u as usize].clone())
        .collect();
    nodes.sort();
    Ok(Some(RoundOutcome {
        ids,
        report: SubgraphReport {
            rank,
            nodes,
            node_count,
            txn_count,
            chi2: chi.statistic,
            psi,
            density,
            reweighted_density: dense.density,
            significant,
            highly_suspicious: psi > density,
            digit_histogram: hist,
        },
    }))
}

/// Extract up to `config.k` node-disjoint significant subgraphs, densest
/// first. Stops early as soon as a round comes back empty or insignificant.
pub fn detect_topk(graph: &TransactionGraph, config: &DetectionConfig) -> Result<DetectionOutput> {
    config.validate()?;
    let model = BenfordModel::standard();
    let n = graph.node_count();
    let global = global_report(graph, &model, config.tau, config.count_multiplicity)?;
    let mut removed = vec![false; n];
    let mut alive = n;
    let mut baseline = global.psi;
    let mut reports = Vec::new();
    for round in 1..=config.k {
        if alive == 0 {
            break;
        }
        if round > 1 && !config.fixed_baseline {
            baseline = masked_psi(graph, &removed, alive);
        }
        match detect_round(graph, &model, config, &removed, baseline, round)? {
            None => break,
            Some(outcome) => {
                for &u in &outcome.ids {
                    removed[u as usize] = true;
                }
                alive -= outcome.ids.len();
                reports.push(outcome.report);
            }
        }
    }
    Ok(DetectionOutput { global, reports })
}

/// Single-shot detection on the full graph; `None` when nothing clears the
/// significance bar.
pub fn detect_one(
    graph: &TransactionGraph,
    config: &DetectionConfig,
) -> Result<Option<SubgraphReport>> {
    let mut single = config.clone();
    single.k = 1;
    Ok(detect_topk(graph, &single)?.reports.into_iter().next())
}

/// Transaction-level statistics of every suffix of a removal order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuffixStat {
    pub step: usize,
    pub remaining: usize,
    pub txn_count: u64,
    pub chi2: f64,
    pub psi: f64,
    pub txn_density: f64,
}

/// Replay a peeling order over the transaction graph, reporting the digit
/// chi-square, psi, and transaction density of each suffix just before its
/// first node is removed. `order` must be a permutation of all nodes.
pub fn peeling_suffix_stats(
    graph: &TransactionGraph,
    order: &[NodeId],
) -> Result<Vec<SuffixStat>> {
    let n = graph.node_count();
    if order.len() != n {
        return Err(Error::InvalidParameter(format!(
            "order covers {} nodes, graph has {n}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for u in order {
        if u.index() >= n || seen[u.index()] {
            return Err(Error::InvalidParameter(format!(
                "order is not a permutation: bad entry {u}"
            )));
        }
        seen[u.index()] = true;
    }
    let model = BenfordModel::standard();
    let mut hist: DigitHistogram = graph
        .transactions()
        .iter()
        .map(|t| t.first_digit)
        .collect();
    let mut txn_alive = vec![true; graph.transaction_count()];
    let mut txn_count = graph.transaction_count() as u64;
    let mut stats = Vec::with_capacity(n);
    for (step, &u) in order.iter().enumerate() {
        let remaining = n - step;
        let chi = chi_square(&hist, &model);
        stats.push(SuffixStat {
            step,
            remaining,
            txn_count,
            chi2: chi.statistic,
            psi: chi.statistic / remaining as f64,
            txn_density: txn_count as f64 / remaining as f64,
        });
        for &t in graph.incident_indices(u)? {
            let ti = t as usize;
            if txn_alive[ti] {
                txn_alive[ti] = false;
                hist.remove(graph.transactions()[ti].first_digit);
                txn_count -= 1;
            }
        }
    }
    Ok(stats)
}

/// Fixed-width text table: one row per extracted subgraph plus the global
/// baseline row.
pub fn render_table(output: &DetectionOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>6} {:>8} {:>10} {:>14} {:>12} {:>10} {:>12} {:>11}",
        "rank", "nodes", "txns", "chi2", "psi", "txns/|S|", "significant", "suspicious"
    );
    let mut row = |label: &str, r: &SubgraphReport| {
        let _ = writeln!(
            s,
            "{:>6} {:>8} {:>10} {:>14.4} {:>12.4} {:>10.4} {:>12} {:>11}",
            label,
            r.node_count,
            r.txn_count,
            r.chi2,
            r.psi,
            r.density,
            if r.significant { "yes" } else { "no" },
            if r.highly_suspicious { "yes" } else { "no" },
        );
    };
    for r in &output.reports {
        row(&r.rank.to_string(), r);
    }
    row("global", &output.global);
    s
}
