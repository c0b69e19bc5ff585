//! Exact densest subgraph via Goldberg's parametric max-flow reduction,
//! driven by binary search on the density guess.
//!
//! For a guess g the network has source -> v with capacity W (the total
//! edge weight), v -> sink with capacity W + 2g - wdeg(v), and each edge
//! u-v with capacity w(u, v) in both directions. The minimum cut equals
//! `W n - 2 max_S (w(S) - g |S|)`, so a source side larger than {s} exists
//! exactly when some set beats density g.

use crate::dsp::DensityResult;
use crate::error::{Error, Result};
use crate::scoring::ReweightedGraph;
use crate::txgraph::NodeId;

pub const DEFAULT_EXACT_NODE_LIMIT: usize = 10_000;

/// Residual capacities below this are treated as saturated.
const FLOW_EPS: f64 = 1e-11;

struct Dinic {
    to: Vec<u32>,
    cap: Vec<f64>,
    head: Vec<Vec<u32>>,
    level: Vec<i32>,
    cursor: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            to: Vec::new(),
            cap: Vec::new(),
            head: vec![Vec::new(); n],
            level: vec![0; n],
            cursor: vec![0; n],
        }
    }

    /// Paired arcs u->v and v->u; the reverse capacity may be nonzero.
    fn add_edge(&mut self, u: usize, v: usize, cap_uv: f64, cap_vu: f64) {
        let id = self.to.len() as u32;
        self.to.push(v as u32);
        self.cap.push(cap_uv);
        self.to.push(u as u32);
        self.cap.push(cap_vu);
        self.head[u].push(id);
        self.head[v].push(id + 1);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.head[u] {
                let v = self.to[e as usize] as usize;
                if self.cap[e as usize] > FLOW_EPS && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: f64) -> f64 {
        if u == t {
            return pushed;
        }
        while self.cursor[u] < self.head[u].len() {
            let e = self.head[u][self.cursor[u]] as usize;
            let v = self.to[e] as usize;
            if self.cap[e] > FLOW_EPS && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, pushed.min(self.cap[e]));
                if got > FLOW_EPS {
                    self.cap[e] -= got;
                    self.cap[e ^ 1] += got;
                    return got;
                }
            }
            self.cursor[u] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut flow = 0.0;
        while self.bfs(s, t) {
            self.cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let pushed = self.dfs(s, t, f64::INFINITY);
                if pushed <= FLOW_EPS {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }

    /// Nodes reachable from `s` in the residual network: the source side of
    /// a minimum cut.
    fn residual_source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &e in &self.head[u] {
                let v = self.to[e as usize] as usize;
                if self.cap[e as usize] > FLOW_EPS && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

pub fn exact_densest(g: &ReweightedGraph) -> Result<DensityResult> {
    exact_densest_with_limit(g, DEFAULT_EXACT_NODE_LIMIT)
}

pub fn exact_densest_with_limit(g: &ReweightedGraph, node_limit: usize) -> Result<DensityResult> {
    let n = g.node_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    if n > node_limit {
        return Err(Error::ExactSolverLimit {
            nodes: n,
            limit: node_limit,
        });
    }
    let w_total = g.total_weight();
    if n == 1 || w_total <= 0.0 {
        return Ok(DensityResult {
            nodes: vec![NodeId(0)],
            density: 0.0,
            optimality_gap: Some(0.0),
        });
    }
    // The whole graph is a valid lower bound; any set of size >= 2 has
    // density at most W / 2.
    let mut best_member: Vec<bool> = vec![true; n];
    let mut lo = w_total / n as f64;
    let mut hi = w_total / 2.0;
    let tol = (1e-9 * hi.max(1.0)).max(1e-12);
    let source = n;
    let sink = n + 1;
    let mut iterations = 0;
    while hi - lo > tol && iterations < 100 {
        iterations += 1;
        let guess = 0.5 * (lo + hi);
        let mut net = Dinic::new(n + 2);
        for v in 0..n {
            net.add_edge(source, v, w_total, 0.0);
            net.add_edge(v, sink, w_total + 2.0 * guess - g.weighted_degree(v), 0.0);
        }
        for e in g.edges() {
            net.add_edge(e.u as usize, e.v as usize, e.weight, e.weight);
        }
        net.max_flow(source, sink);
        let reach = net.residual_source_side(source);
        let member: Vec<bool> = (0..n).map(|v| reach[v]).collect();
        if member.iter().any(|&m| m) {
            // Candidate set found; trust its exactly recomputed density, not
            // the flow value.
            let density = g.induced_density(&member);
            if density > lo {
                lo = density;
                best_member = member;
                continue;
            }
        }
        hi = guess;
    }
    let nodes: Vec<NodeId> = best_member
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(v, _)| NodeId(v as u32))
        .collect();
    let density = g.induced_density(&best_member);
    Ok(DensityResult {
        nodes,
        density,
        optimality_gap: Some((hi - lo).max(0.0)),
    })
}
