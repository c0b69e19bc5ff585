//! Densest-subgraph solvers over a [`ReweightedGraph`]: greedy peeling, its
//! load-balanced iterated variant, an exact max-flow solver, and a brute
//! force oracle for small instances.
//!
//! Density of a node set S is always `w(S) / |S|`, the total weight of the
//! edges with both endpoints in S divided by the set size.

mod brute;
mod exact;
mod peeling;

pub use brute::{brute_force_densest, BRUTE_FORCE_NODE_LIMIT};
pub use exact::{exact_densest, exact_densest_with_limit, DEFAULT_EXACT_NODE_LIMIT};
pub use peeling::{greedy_peel, peel_iterations, PeelingTrace};

use crate::txgraph::NodeId;

/// A candidate densest subgraph.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityResult {
    /// Members in ascending id order.
    pub nodes: Vec<NodeId>,
    pub density: f64,
    /// Width of the bracketing interval for solvers that certify one;
    /// `None` for the heuristics.
    pub optimality_gap: Option<f64>,
}
