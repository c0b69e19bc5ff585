//! Graphviz export of a detected subgraph, nodes annotated with their
//! anomaly scores and edges with their amounts.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::Result;
use crate::pipeline::SubgraphReport;
use crate::scoring::NodeScoreTable;
use crate::txgraph::TransactionGraph;

fn quote(key: &str) -> String {
    format!("\"{}\"", key.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Render the induced subgraph of a report as a directed Graphviz graph.
/// Every key in the report must exist in `graph`.
pub fn subgraph_dot(
    graph: &TransactionGraph,
    scores: &NodeScoreTable,
    report: &SubgraphReport,
) -> Result<String> {
    let mut members = HashSet::new();
    let mut out = String::new();
    let _ = writeln!(out, "digraph anomaly_rank{} {{", report.rank);
    let _ = writeln!(out, "  node [shape=ellipse];");
    for key in &report.nodes {
        let id = graph
            .node_by_key(key)
            .ok_or_else(|| crate::error::Error::UnknownKey(key.clone()))?;
        members.insert(id);
        let _ = writeln!(
            out,
            "  {} [label=\"{}\\ns={:.3}\"];",
            quote(key),
            key.replace('\\', "\\\\").replace('"', "\\\""),
            scores.score(id)?
        );
    }
    for t in graph.transactions() {
        if members.contains(&t.src) && members.contains(&t.dst) {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{} ({})\"];",
                quote(graph.key_of(t.src)?),
                quote(graph.key_of(t.dst)?),
                t.amount,
                t.first_digit
            );
        }
    }
    out.push_str("}\n");
    Ok(out)
}
