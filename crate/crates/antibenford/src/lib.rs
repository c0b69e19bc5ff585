//! Detection of dense transaction subgraphs whose amounts defy Benford's
//! law.
//!
//! Money flows whose leading digits follow Benford's law are ordinary;
//! tightly-knit groups of accounts trading amounts with a skewed digit
//! profile are not. This crate scores every node by the chi-square
//! deviation of its incident transaction amounts, reweights each edge by
//! the geometric mean of its endpoints' scores, and extracts the densest
//! subgraphs of the reweighted graph. A detected set is reported only when
//! its average deviation clears a significance multiple of the whole
//! graph's.
//!
//! ```
//! use antibenford::pipeline::{detect_topk, DetectionConfig};
//! use antibenford::synthgen::{generate, SynthSpec};
//!
//! let (graph, truth) = generate(&SynthSpec::default()).unwrap();
//! let config = DetectionConfig { k: 3, ..DetectionConfig::default() };
//! let output = detect_topk(&graph, &config).unwrap();
//! assert_eq!(output.reports.len(), 3);
//! for (report, planted) in output.reports.iter().zip(&truth.anomalous) {
//!     assert_eq!(report.nodes.len(), planted.len());
//! }
//! ```

pub mod benford;
pub mod dsp;
pub mod error;
pub mod evalkit;
pub mod export;
pub mod pipeline;
pub mod scoring;
pub mod synthgen;
pub mod txgraph;

pub use benford::{BenfordModel, Digit, DigitHistogram};
pub use error::{Error, Result};
pub use pipeline::{
    detect_one, detect_topk, DetectionConfig, DetectionOutput, SolverKind, SubgraphReport,
};
pub use scoring::{node_scores, reweight, NodeScoreTable, ReweightedGraph};
pub use txgraph::{IngestConfig, NodeId, Transaction, TransactionGraph};
