//! Per-node anomaly scores and the score-reweighted simple graph that the
//! densest-subgraph solvers run on.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::benford::{chi_square, BenfordModel, DigitHistogram, DIGIT_COUNT};
use crate::error::{Error, Result};
use crate::txgraph::{NodeId, TransactionGraph};

/// Chi-square score and live degree for every node.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeScoreTable {
    scores: Vec<f64>,
    degrees: Vec<u32>,
}

impl NodeScoreTable {
    pub fn new(scores: Vec<f64>, degrees: Vec<u32>) -> Result<Self> {
        if scores.len() != degrees.len() {
            return Err(Error::InvalidParameter(format!(
                "score and degree vectors disagree: {} vs {}",
                scores.len(),
                degrees.len()
            )));
        }
        Ok(NodeScoreTable { scores, degrees })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn score(&self, u: NodeId) -> Result<f64> {
        self.scores
            .get(u.index())
            .copied()
            .ok_or(Error::InvalidNodeId(u.0))
    }

    pub fn degree(&self, u: NodeId) -> Result<u32> {
        self.degrees
            .get(u.index())
            .copied()
            .ok_or(Error::InvalidNodeId(u.0))
    }

    /// Score divided by degree; `None` for isolated nodes.
    pub fn normalized(&self, u: NodeId) -> Result<Option<f64>> {
        let s = self.score(u)?;
        let d = self.degree(u)?;
        Ok(if d == 0 { None } else { Some(s / d as f64) })
    }

    /// One JSON object per line: node key, degree, score, score per degree.
    pub fn write_jsonl<W: Write>(&self, graph: &TransactionGraph, mut w: W) -> Result<()> {
        #[derive(Serialize)]
        struct Row<'a> {
            node_key: &'a str,
            degree: u32,
            score: f64,
            score_per_degree: Option<f64>,
        }
        for (i, key) in graph.keys().iter().enumerate() {
            let u = NodeId(i as u32);
            let row = Row {
                node_key: key,
                degree: self.degree(u)?,
                score: self.score(u)?,
                score_per_degree: self.normalized(u)?,
            };
            serde_json::to_writer(&mut w, &row)?;
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Chi-square score of every node over its own incident transactions.
pub fn node_scores(graph: &TransactionGraph, model: &BenfordModel) -> NodeScoreTable {
    scores_impl(graph, model, None)
}

/// Like [`node_scores`], but restricted to the subgraph induced by nodes
/// with `removed[u] == false`. Transactions touching a removed node are
/// invisible; fully cut-off survivors score 0 with degree 0.
pub fn node_scores_masked(
    graph: &TransactionGraph,
    model: &BenfordModel,
    removed: &[bool],
) -> NodeScoreTable {
    assert_eq!(removed.len(), graph.node_count(), "mask size");
    scores_impl(graph, model, Some(removed))
}

fn scores_impl(
    graph: &TransactionGraph,
    model: &BenfordModel,
    removed: Option<&[bool]>,
) -> NodeScoreTable {
    let n = graph.node_count();
    let mut counts = vec![0u64; n * DIGIT_COUNT];
    let mut degrees = vec![0u32; n];
    let alive = |u: NodeId| removed.is_none_or(|r| !r[u.index()]);
    for t in graph.transactions() {
        if !alive(t.src) || !alive(t.dst) {
            continue;
        }
        let slot = t.first_digit.index();
        counts[t.src.index() * DIGIT_COUNT + slot] += 1;
        degrees[t.src.index()] += 1;
        if t.src != t.dst {
            counts[t.dst.index() * DIGIT_COUNT + slot] += 1;
            degrees[t.dst.index()] += 1;
        }
    }
    let scores: Vec<f64> = counts
        .par_chunks(DIGIT_COUNT)
        .map(|chunk| {
            let hist = DigitHistogram::from_counts(chunk.try_into().unwrap());
            chi_square(&hist, model).statistic
        })
        .collect();
    NodeScoreTable { scores, degrees }
}

/// One undirected edge of the reweighted graph, normalized to `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge {
    pub u: u32,
    pub v: u32,
    pub weight: f64,
}

/// Simple undirected weighted graph over the same node ids as the
/// transaction graph it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReweightedGraph {
    n: usize,
    edges: Vec<WeightedEdge>,
    offsets: Vec<usize>,
    adj: Vec<(u32, f64)>,
    weighted_degrees: Vec<f64>,
    total_weight: f64,
}

impl ReweightedGraph {
    /// Build directly from an edge list. Duplicate pairs are merged by
    /// summing their weights; self-loops and negative weights are rejected.
    pub fn from_edges(n: usize, raw: &[(u32, u32, f64)]) -> Result<Self> {
        let mut edges = Vec::with_capacity(raw.len());
        for &(a, b, w) in raw {
            if a == b {
                return Err(Error::InvalidParameter(format!(
                    "self-loop on node {a} in weighted graph"
                )));
            }
            if (a as usize) >= n || (b as usize) >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) outside node range 0..{n}"
                )));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({a}, {b}) has invalid weight {w}"
                )));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            edges.push(WeightedEdge { u, v, weight: w });
        }
        edges.sort_by_key(|e| (e.u, e.v));
        edges.dedup_by(|next, prev| {
            if next.u == prev.u && next.v == prev.v {
                prev.weight += next.weight;
                true
            } else {
                false
            }
        });
        Ok(Self::from_sorted_unique(n, edges))
    }

    fn from_sorted_unique(n: usize, edges: Vec<WeightedEdge>) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for e in &edges {
            offsets[e.u as usize + 1] += 1;
            offsets[e.v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut adj = vec![(0u32, 0f64); offsets[n]];
        let mut weighted_degrees = vec![0f64; n];
        let mut total_weight = 0.0;
        for e in &edges {
            adj[cursor[e.u as usize]] = (e.v, e.weight);
            cursor[e.u as usize] += 1;
            adj[cursor[e.v as usize]] = (e.u, e.weight);
            cursor[e.v as usize] += 1;
            weighted_degrees[e.u as usize] += e.weight;
            weighted_degrees[e.v as usize] += e.weight;
            total_weight += e.weight;
        }
        ReweightedGraph {
            n,
            edges,
            offsets,
            adj,
            weighted_degrees,
            total_weight,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[(u32, f64)] {
        &self.adj[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn weighted_degree(&self, u: usize) -> f64 {
        self.weighted_degrees[u]
    }

    pub fn weighted_degrees(&self) -> &[f64] {
        &self.weighted_degrees
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// Weight of the subgraph induced by `member` divided by its size;
    /// 0 for an empty set.
    pub fn induced_density(&self, member: &[bool]) -> f64 {
        assert_eq!(member.len(), self.n, "membership mask size");
        let size = member.iter().filter(|&&m| m).count();
        if size == 0 {
            return 0.0;
        }
        let weight: f64 = self
            .edges
            .iter()
            .filter(|e| member[e.u as usize] && member[e.v as usize])
            .map(|e| e.weight)
            .sum();
        weight / size as f64
    }
}

/// Collapse parallel transactions to simple edges weighted by
/// `sqrt(score(u) * score(v))`. With `count_multiplicity` the weight is
/// additionally multiplied by the number of parallel transactions.
///
/// Self-loop transactions never produce an edge.
pub fn reweight(
    graph: &TransactionGraph,
    scores: &NodeScoreTable,
    count_multiplicity: bool,
) -> ReweightedGraph {
    reweight_impl(graph, scores, None, count_multiplicity)
}

/// Masked variant of [`reweight`]: edges touching a removed node vanish.
/// Removed nodes keep their id slots and stay isolated.
pub fn reweight_masked(
    graph: &TransactionGraph,
    scores: &NodeScoreTable,
    removed: &[bool],
    count_multiplicity: bool,
) -> ReweightedGraph {
    assert_eq!(removed.len(), graph.node_count(), "mask size");
    reweight_impl(graph, scores, Some(removed), count_multiplicity)
}

fn reweight_impl(
    graph: &TransactionGraph,
    scores: &NodeScoreTable,
    removed: Option<&[bool]>,
    count_multiplicity: bool,
) -> ReweightedGraph {
    let n = graph.node_count();
    assert_eq!(scores.len(), n, "score table size");
    let alive = |u: NodeId| removed.is_none_or(|r| !r[u.index()]);
    let mut pairs: Vec<u64> = graph
        .transactions()
        .iter()
        .filter(|t| t.src != t.dst && alive(t.src) && alive(t.dst))
        .map(|t| {
            let (a, b) = if t.src.0 < t.dst.0 {
                (t.src.0, t.dst.0)
            } else {
                (t.dst.0, t.src.0)
            };
            (a as u64) << 32 | b as u64
        })
        .collect();
    pairs.par_sort_unstable();
    let mut edges = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let key = pairs[i];
        let mut j = i + 1;
        while j < pairs.len() && pairs[j] == key {
            j += 1;
        }
        let u = (key >> 32) as u32;
        let v = key as u32;
        let mut weight = (scores.scores[u as usize] * scores.scores[v as usize]).sqrt();
        if count_multiplicity {
            weight *= (j - i) as f64;
        }
        edges.push(WeightedEdge { u, v, weight });
        i = j;
    }
    ReweightedGraph::from_sorted_unique(n, edges)
}
