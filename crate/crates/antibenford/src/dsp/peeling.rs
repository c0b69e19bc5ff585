//! Greedy peeling (a 1/2-approximation) and load-balanced iterated peeling.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::Write;

use crate::dsp::DensityResult;
use crate::error::{Error, Result};
use crate::scoring::ReweightedGraph;
use crate::txgraph::NodeId;

/// f64 ordered by `total_cmp`; peeling keys are finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Full record of one peeling run.
#[derive(Debug, Clone, PartialEq)]
pub struct PeelingTrace {
    /// Nodes in removal order; the whole vertex set, front to back.
    pub removal_order: Vec<NodeId>,
    /// `suffix_density[i]` is the density of the still-present set just
    /// before step `i` removes `removal_order[i]`.
    pub suffix_density: Vec<f64>,
    /// Step whose suffix achieves the best density (ties prefer the
    /// smallest suffix).
    pub best_step: usize,
    pub best_density: f64,
}

impl PeelingTrace {
    /// Members of the best suffix, ascending by id.
    pub fn best_suffix(&self) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> = self.removal_order[self.best_step..].to_vec();
        nodes.sort();
        nodes
    }

    /// `step,removed_node,suffix_density` rows, nodes rendered through
    /// `label`.
    pub fn write_csv_with<W: Write>(
        &self,
        mut w: W,
        mut label: impl FnMut(NodeId) -> String,
    ) -> Result<()> {
        writeln!(w, "step,removed_node,suffix_density")?;
        for (i, &u) in self.removal_order.iter().enumerate() {
            writeln!(w, "{},{},{}", i, label(u), self.suffix_density[i])?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        self.write_csv_with(w, |u| u.to_string())
    }
}

/// Remove nodes one at a time, always taking the smallest value of
/// `loads[u] + remaining weighted degree` (ties broken by smallest id).
/// With `update_loads`, each node's degree at removal is folded into its
/// load for the next round.
fn peel_round(g: &ReweightedGraph, loads: &mut [f64], update_loads: bool) -> Vec<u32> {
    let n = g.node_count();
    let mut wdeg: Vec<f64> = g.weighted_degrees().to_vec();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut heap: BinaryHeap<Reverse<(Key, u32)>> = (0..n)
        .map(|u| Reverse((Key(loads[u] + wdeg[u]), u as u32)))
        .collect();
    while let Some(Reverse((key, u))) = heap.pop() {
        let ui = u as usize;
        // Lazy deletion: an entry is current only if it matches the live key.
        if !alive[ui] || key.0 != loads[ui] + wdeg[ui] {
            continue;
        }
        alive[ui] = false;
        order.push(u);
        if update_loads {
            loads[ui] += wdeg[ui];
        }
        for &(v, w) in g.neighbors(ui) {
            let vi = v as usize;
            if alive[vi] {
                wdeg[vi] -= w;
                heap.push(Reverse((Key(loads[vi] + wdeg[vi]), v)));
            }
        }
    }
    debug_assert_eq!(order.len(), n);
    order
}

/// Density of every suffix of `order`, plus the best step. Ties go to the
/// later (smaller) suffix.
fn suffix_profile(g: &ReweightedGraph, order: &[u32]) -> (Vec<f64>, usize, f64) {
    let n = order.len();
    let mut pos = vec![0u32; n];
    for (i, &u) in order.iter().enumerate() {
        pos[u as usize] = i as u32;
    }
    // suffix_weight[i] = total weight among order[i..].
    let mut suffix_weight = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        let u = order[i] as usize;
        let mut added = 0.0;
        for &(v, w) in g.neighbors(u) {
            if pos[v as usize] > i as u32 {
                added += w;
            }
        }
        suffix_weight[i] = suffix_weight[i + 1] + added;
    }
    let mut densities = Vec::with_capacity(n);
    let mut best_step = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, &w) in suffix_weight.iter().take(n).enumerate() {
        let d = w / (n - i) as f64;
        densities.push(d);
        if d >= best {
            best = d;
            best_step = i;
        }
    }
    (densities, best_step, best)
}

/// Charikar-style greedy peeling. The returned density is at least half the
/// optimum; the trace records the whole removal schedule.
pub fn greedy_peel(g: &ReweightedGraph) -> Result<(DensityResult, PeelingTrace)> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut loads = vec![0.0; n];
    let order = peel_round(g, &mut loads, false);
    let (densities, best_step, best) = suffix_profile(g, &order);
    let trace = PeelingTrace {
        removal_order: order.iter().map(|&u| NodeId(u)).collect(),
        suffix_density: densities,
        best_step,
        best_density: best,
    };
    Ok((
        DensityResult {
            nodes: trace.best_suffix(),
            density: best,
            optimality_gap: None,
        },
        trace,
    ))
}

/// Repeated peeling with load accumulation: each round biases removal
/// toward nodes that survived long in earlier rounds, which converges
/// toward the optimum as `iterations` grows. One iteration is exactly
/// [`greedy_peel`].
pub fn peel_iterations(g: &ReweightedGraph, iterations: usize) -> Result<DensityResult> {
    if iterations == 0 {
        return Err(Error::InvalidParameter(
            "iterated peeling needs at least one round".into(),
        ));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut loads = vec![0.0; n];
    let mut best: Option<(f64, Vec<u32>, usize)> = None;
    for _ in 0..iterations {
        let order = peel_round(g, &mut loads, true);
        let (_, step, density) = suffix_profile(g, &order);
        let better = match &best {
            None => true,
            Some((d, _, _)) => density > *d,
        };
        if better {
            best = Some((density, order, step));
        }
    }
    let (density, order, step) = best.unwrap();
    let mut nodes: Vec<NodeId> = order[step..].iter().map(|&u| NodeId(u)).collect();
    nodes.sort();
    Ok(DensityResult {
        nodes,
        density,
        optimality_gap: None,
    })
}
