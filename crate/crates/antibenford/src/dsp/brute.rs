//! Exhaustive densest-subgraph search over all subsets; the ground-truth
//! oracle for cross-checking the other solvers on small graphs.

use crate::dsp::DensityResult;
use crate::error::{Error, Result};
use crate::scoring::ReweightedGraph;
use crate::txgraph::NodeId;

pub const BRUTE_FORCE_NODE_LIMIT: usize = 20;

/// Enumerate every nonempty subset and return the densest (ties keep the
/// first subset in mask order, which is deterministic).
pub fn brute_force_densest(g: &ReweightedGraph) -> Result<DensityResult> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n > BRUTE_FORCE_NODE_LIMIT {
        return Err(Error::BruteForceLimit {
            nodes: n,
            limit: BRUTE_FORCE_NODE_LIMIT,
        });
    }
    // Dense adjacency matrix so the incremental sums below are O(n) each.
    let mut adj = vec![0.0f64; n * n];
    for e in g.edges() {
        adj[e.u as usize * n + e.v as usize] = e.weight;
        adj[e.v as usize * n + e.u as usize] = e.weight;
    }
    // weight[mask] built incrementally: strip the lowest set bit and add its
    // edges into the rest of the mask.
    let full = 1usize << n;
    let mut weight = vec![0.0f64; full];
    let mut best_mask = 1usize;
    let mut best_density = 0.0f64;
    for mask in 1..full {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut w = weight[rest];
        let row = &adj[low * n..(low + 1) * n];
        let mut bits = rest;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            w += row[v];
            bits &= bits - 1;
        }
        weight[mask] = w;
        let density = w / mask.count_ones() as f64;
        if density > best_density {
            best_density = density;
            best_mask = mask;
        }
    }
    let nodes: Vec<NodeId> = (0..n)
        .filter(|&v| best_mask >> v & 1 == 1)
        .map(|v| NodeId(v as u32))
        .collect();
    Ok(DensityResult {
        nodes,
        density: best_density,
        optimality_gap: Some(0.0),
    })
}
