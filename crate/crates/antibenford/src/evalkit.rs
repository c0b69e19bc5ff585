//! Evaluation utilities: detection F1 against planted ground truth, label
//! purity, and the histogram/frequency reports behind diagnostic plots.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::Serialize;

use crate::benford::{BenfordModel, DIGIT_COUNT};
use crate::error::{Error, Result};
use crate::pipeline::SubgraphReport;
use crate::scoring::NodeScoreTable;
use crate::txgraph::NodeId;

/// Node-level precision/recall/F1 of a detected set against the truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(skip)]
    pub true_positives: usize,
    #[serde(skip)]
    pub detected_count: usize,
    #[serde(skip)]
    pub truth_count: usize,
}

/// Compare detected node keys with the planted ones. An empty detection
/// scores 0 across the board; an empty truth set is an error.
pub fn f1(detected: &BTreeSet<String>, truth: &BTreeSet<String>) -> Result<DetectionScore> {
    if truth.is_empty() {
        return Err(Error::InvalidParameter(
            "ground truth node set is empty".into(),
        ));
    }
    let tp = detected.intersection(truth).count();
    let precision = if detected.is_empty() {
        0.0
    } else {
        tp as f64 / detected.len() as f64
    };
    let recall = tp as f64 / truth.len() as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(DetectionScore {
        precision,
        recall,
        f1,
        true_positives: tp,
        detected_count: detected.len(),
        truth_count: truth.len(),
    })
}

/// Label-distribution entropy of a node set; 0 means perfectly pure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurityScore {
    /// Natural-log entropy of the label proportions.
    pub entropy: f64,
    pub proportions: BTreeMap<String, f64>,
}

pub fn entropy_purity(
    nodes: &BTreeSet<String>,
    labels: &BTreeMap<String, String>,
) -> Result<PurityScore> {
    if nodes.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot take the entropy of an empty node set".into(),
        ));
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for key in nodes {
        let label = labels
            .get(key)
            .ok_or_else(|| Error::UnlabeledNode(key.clone()))?;
        *counts.entry(label).or_insert(0) += 1;
    }
    let total = nodes.len() as f64;
    let mut entropy = 0.0;
    let mut proportions = BTreeMap::new();
    for (label, count) in counts {
        let p = count as f64 / total;
        entropy -= p * p.ln();
        proportions.insert(label.to_owned(), p);
    }
    // Guard against a negative zero sneaking out of the accumulation.
    entropy += 0.0;
    Ok(PurityScore {
        entropy,
        proportions,
    })
}

/// How score/degree ratios get bucketed.
#[derive(Debug, Clone)]
pub enum BinningSpec {
    /// Geometric bins spanning the observed positive ratios, with a leading
    /// `[0, min)` bin so exact zeros stay visible.
    Auto { bins: usize },
    /// Explicit ascending bin edges; values outside the range are clamped
    /// into the end bins.
    Edges(Vec<f64>),
}

impl Default for BinningSpec {
    fn default() -> Self {
        BinningSpec::Auto { bins: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreHistogram {
    /// `counts.len() + 1` ascending edges.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl ScoreHistogram {
    /// `bin_lo,bin_hi,count` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "bin_lo,bin_hi,count")?;
        for (i, c) in self.counts.iter().enumerate() {
            writeln!(w, "{},{},{}", self.edges[i], self.edges[i + 1], c)?;
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Histogram of score/degree over all nodes with degree at least one.
pub fn score_degree_histogram(
    table: &NodeScoreTable,
    spec: &BinningSpec,
) -> Result<ScoreHistogram> {
    let ratios: Vec<f64> = (0..table.len())
        .filter_map(|i| table.normalized(NodeId(i as u32)).unwrap())
        .collect();
    if ratios.is_empty() {
        return Err(Error::InvalidParameter(
            "no nodes with degree >= 1 to histogram".into(),
        ));
    }
    let edges = match spec {
        BinningSpec::Auto { bins } => {
            if *bins < 2 {
                return Err(Error::InvalidParameter(
                    "auto binning needs at least 2 bins".into(),
                ));
            }
            let positives: Vec<f64> = ratios.iter().copied().filter(|&r| r > 0.0).collect();
            let (lo, hi) = match (
                positives.iter().copied().reduce(f64::min),
                positives.iter().copied().reduce(f64::max),
            ) {
                (Some(lo), Some(hi)) if hi > lo => (lo, hi),
                (Some(lo), Some(_)) => (lo, lo * 10.0),
                // All ratios are zero: any positive span works, everything
                // lands in the leading zero bin.
                _ => (1e-9, 1.0),
            };
            let mut edges = Vec::with_capacity(bins + 1);
            edges.push(0.0);
            let steps = bins - 1;
            let ratio = (hi / lo).powf(1.0 / steps as f64);
            for i in 0..=steps {
                edges.push(lo * ratio.powi(i as i32));
            }
            // Guard against rounding leaving the max outside the last edge.
            let last = edges.last_mut().unwrap();
            *last = last.max(hi);
            edges
        }
        BinningSpec::Edges(edges) => {
            if edges.len() < 2 || edges.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameter(
                    "explicit edges must be ascending with at least two entries".into(),
                ));
            }
            edges.clone()
        }
    };
    let mut counts = vec![0u64; edges.len() - 1];
    for r in &ratios {
        // Last bin is closed on the right; out-of-range values clamp.
        let slot = edges.partition_point(|e| e <= r);
        let idx = slot.saturating_sub(1).min(counts.len() - 1);
        counts[idx] += 1;
    }
    Ok(ScoreHistogram { edges, counts })
}

/// One digit-frequency curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigitSeries {
    pub name: String,
    pub freqs: [f64; DIGIT_COUNT],
}

/// Benford, global, and per-rank digit frequencies, side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigitDistribution {
    pub series: Vec<DigitSeries>,
}

impl DigitDistribution {
    /// Digit-major CSV: `digit,freq_benford,freq_global,freq_rank1,...`
    /// with one row per digit.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = self
            .series
            .iter()
            .map(|s| format!("freq_{}", s.name))
            .collect();
        writeln!(w, "digit,{}", header.join(","))?;
        for d in 0..DIGIT_COUNT {
            let row: Vec<String> = self.series.iter().map(|s| s.freqs[d].to_string()).collect();
            writeln!(w, "{},{}", d + 1, row.join(","))?;
        }
        Ok(())
    }
}

/// Build the digit-frequency comparison for a detection run: the Benford
/// reference, the whole graph, then each ranked subgraph.
pub fn digit_distribution_report(
    reports: &[SubgraphReport],
    global: &SubgraphReport,
) -> DigitDistribution {
    let model = BenfordModel::standard();
    let mut series = vec![
        DigitSeries {
            name: "benford".into(),
            freqs: *model.probabilities(),
        },
        DigitSeries {
            name: "global".into(),
            freqs: global.digit_histogram.freqs(),
        },
    ];
    for r in reports {
        series.push(DigitSeries {
            name: format!("rank{}", r.rank),
            freqs: r.digit_histogram.freqs(),
        });
    }
    DigitDistribution { series }
}
