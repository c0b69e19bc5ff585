use std::io;

use thiserror::Error;

/// Errors surfaced by graph ingestion, scoring, and detection.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("empty graph: no transactions survived ingestion")]
    EmptyGraph,

    #[error("invalid node id {0}")]
    InvalidNodeId(u32),

    #[error("invalid digit {0}: first digits lie in 1..=9")]
    InvalidDigit(u8),

    #[error("invalid amount {0}: amounts must be positive and finite")]
    InvalidAmount(f64),

    #[error("cannot extract a first digit from {0:?}")]
    InvalidAmountLiteral(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph has {nodes} nodes, above the exact-solver limit {limit}; use greedy peeling instead")]
    ExactSolverLimit { nodes: usize, limit: usize },

    #[error("graph has {nodes} nodes, above the brute-force limit {limit}")]
    BruteForceLimit { nodes: usize, limit: usize },

    #[error("node {0:?} has no label")]
    UnlabeledNode(String),

    #[error("unknown node key {0:?}")]
    UnknownKey(String),

    #[error("no subgraph report with rank {0}")]
    UnknownRank(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
