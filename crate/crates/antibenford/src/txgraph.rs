//! Transaction multigraph: CSV ingestion, key interning, and an incidence
//! index over parallel transactions.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::benford::{first_digit, first_digit_of_str, Digit};
use crate::error::{Error, Result};

/// Dense internal node identifier, assigned in first-appearance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A single directed transfer. Parallel transactions between the same pair
/// of nodes stay distinct.
#[derive(Debug, Clone, PartialEq)]
pub struct Transaction {
    pub src: NodeId,
    pub dst: NodeId,
    pub amount: f64,
    pub first_digit: Digit,
    pub timestamp: Option<i64>,
}

/// Knobs for CSV ingestion.
#[derive(Debug, Clone)]
pub struct IngestConfig {
    /// Rows with an amount below this are dropped. Non-positive amounts are
    /// always dropped regardless of the threshold.
    pub min_value: f64,
    pub delimiter: u8,
    /// Keep rows whose source and destination coincide. A kept self-loop
    /// appears once in its node's incidence list.
    pub keep_self_loops: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            min_value: 1.0,
            delimiter: b',',
            keep_self_loops: false,
        }
    }
}

/// Bookkeeping from one ingestion pass.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadSummary {
    pub rows_read: usize,
    pub kept: usize,
    /// Rows dropped for a non-positive amount or one below `min_value`.
    pub dropped_below_min: usize,
    pub dropped_self_loops: usize,
}

/// Incrementally assembles a [`TransactionGraph`], interning keys in the
/// order they first appear.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    keys: Vec<String>,
    lookup: HashMap<String, u32>,
    txns: Vec<Transaction>,
    allow_self_loops: bool,
}

impl GraphBuilder {
    pub fn new() -> Self {
        GraphBuilder::default()
    }

    pub fn with_self_loops(allow: bool) -> Self {
        GraphBuilder {
            allow_self_loops: allow,
            ..GraphBuilder::default()
        }
    }

    /// Intern a key, creating an (initially isolated) node if it is new.
    pub fn ensure_node(&mut self, key: &str) -> NodeId {
        if let Some(&id) = self.lookup.get(key) {
            return NodeId(id);
        }
        let id = self.keys.len() as u32;
        self.keys.push(key.to_owned());
        self.lookup.insert(key.to_owned(), id);
        NodeId(id)
    }

    pub fn add(
        &mut self,
        src: &str,
        dst: &str,
        amount: f64,
        timestamp: Option<i64>,
    ) -> Result<()> {
        if src == dst && !self.allow_self_loops {
            return Err(Error::InvalidParameter(format!(
                "self-loop on {src:?} not allowed"
            )));
        }
        let digit = first_digit(amount)?;
        let src = self.ensure_node(src);
        let dst = self.ensure_node(dst);
        self.txns.push(Transaction {
            src,
            dst,
            amount,
            first_digit: digit,
            timestamp,
        });
        Ok(())
    }

    pub fn transaction_count(&self) -> usize {
        self.txns.len()
    }

    pub fn build(self) -> Result<TransactionGraph> {
        if self.keys.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Ok(TransactionGraph::from_parts(
            self.keys,
            self.lookup,
            self.txns,
        ))
    }
}

/// An in-memory transaction multigraph with a CSR incidence index.
#[derive(Debug, Clone)]
pub struct TransactionGraph {
    keys: Vec<String>,
    lookup: HashMap<String, u32>,
    txns: Vec<Transaction>,
    /// CSR offsets into `arcs`, one slot per node plus a sentinel.
    offsets: Vec<usize>,
    /// Transaction indices, grouped by incident node. A transaction between
    /// two distinct nodes appears under both; a self-loop appears once.
    arcs: Vec<u32>,
}

impl TransactionGraph {
    fn from_parts(keys: Vec<String>, lookup: HashMap<String, u32>, txns: Vec<Transaction>) -> Self {
        let n = keys.len();
        let mut offsets = vec![0usize; n + 1];
        for t in &txns {
            offsets[t.src.index() + 1] += 1;
            if t.src != t.dst {
                offsets[t.dst.index() + 1] += 1;
            }
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut arcs = vec![0u32; offsets[n]];
        for (idx, t) in txns.iter().enumerate() {
            arcs[cursor[t.src.index()]] = idx as u32;
            cursor[t.src.index()] += 1;
            if t.src != t.dst {
                arcs[cursor[t.dst.index()]] = idx as u32;
                cursor[t.dst.index()] += 1;
            }
        }
        TransactionGraph {
            keys,
            lookup,
            txns,
            offsets,
            arcs,
        }
    }

    pub fn load_csv(path: impl AsRef<Path>, config: &IngestConfig) -> Result<(Self, LoadSummary)> {
        let file = File::open(path)?;
        Self::load_csv_from_reader(file, config)
    }

    pub fn load_csv_from_reader<R: Read>(
        reader: R,
        config: &IngestConfig,
    ) -> Result<(Self, LoadSummary)> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .delimiter(config.delimiter)
            .from_reader(reader);
        let mut builder = GraphBuilder::with_self_loops(config.keep_self_loops);
        let mut summary = LoadSummary::default();
        let mut record = csv::StringRecord::new();
        let mut first = true;
        while rdr.read_record(&mut record)? {
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            let malformed = |reason: &str| Error::MalformedRow {
                line,
                reason: reason.to_owned(),
            };
            if !(3..=4).contains(&record.len()) {
                return Err(malformed(&format!(
                    "expected 3 or 4 fields, found {}",
                    record.len()
                )));
            }
            let amount_field = &record[2];
            if first {
                first = false;
                // Header sniffing: a first row whose value column is not a
                // number is taken to be a header and skipped.
                if amount_field.parse::<f64>().is_err() {
                    continue;
                }
            }
            summary.rows_read += 1;
            let src = &record[0];
            let dst = &record[1];
            if src.is_empty() || dst.is_empty() {
                return Err(malformed("empty node key"));
            }
            let amount: f64 = amount_field
                .parse()
                .map_err(|_| malformed(&format!("unparseable amount {amount_field:?}")))?;
            if !amount.is_finite() {
                return Err(malformed(&format!("non-finite amount {amount_field:?}")));
            }
            if amount <= 0.0 || amount < config.min_value {
                summary.dropped_below_min += 1;
                continue;
            }
            if src == dst && !config.keep_self_loops {
                summary.dropped_self_loops += 1;
                continue;
            }
            let timestamp = match record.get(3) {
                None | Some("") => None,
                Some(field) => Some(
                    field
                        .parse::<i64>()
                        .map_err(|_| malformed(&format!("unparseable timestamp {field:?}")))?,
                ),
            };
            // Read the digit from the literal text so no rounding can move it.
            let digit = first_digit_of_str(amount_field)
                .map_err(|_| malformed(&format!("no leading digit in {amount_field:?}")))?;
            let src_id = builder.ensure_node(src);
            let dst_id = builder.ensure_node(dst);
            builder.txns.push(Transaction {
                src: src_id,
                dst: dst_id,
                amount,
                first_digit: digit,
                timestamp,
            });
            summary.kept += 1;
        }
        if summary.kept == 0 {
            return Err(Error::EmptyGraph);
        }
        Ok((builder.build()?, summary))
    }

    pub fn node_count(&self) -> usize {
        self.keys.len()
    }

    pub fn transaction_count(&self) -> usize {
        self.txns.len()
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn key_of(&self, u: NodeId) -> Result<&str> {
        self.keys
            .get(u.index())
            .map(String::as_str)
            .ok_or(Error::InvalidNodeId(u.0))
    }

    pub fn node_by_key(&self, key: &str) -> Option<NodeId> {
        self.lookup.get(key).map(|&id| NodeId(id))
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.txns
    }

    /// Number of incident transactions, counting multiplicity.
    pub fn degree(&self, u: NodeId) -> Result<usize> {
        let i = u.index();
        if i >= self.keys.len() {
            return Err(Error::InvalidNodeId(u.0));
        }
        Ok(self.offsets[i + 1] - self.offsets[i])
    }

    /// Indices into [`Self::transactions`] of the transactions touching `u`.
    pub fn incident_indices(&self, u: NodeId) -> Result<&[u32]> {
        let i = u.index();
        if i >= self.keys.len() {
            return Err(Error::InvalidNodeId(u.0));
        }
        Ok(&self.arcs[self.offsets[i]..self.offsets[i + 1]])
    }

    pub fn incident(&self, u: NodeId) -> Result<impl Iterator<Item = &Transaction> + '_> {
        Ok(self
            .incident_indices(u)?
            .iter()
            .map(move |&t| &self.txns[t as usize]))
    }

    /// All transactions with both endpoints inside `nodes`.
    pub fn induced_transactions(&self, nodes: &HashSet<NodeId>) -> Vec<&Transaction> {
        self.txns
            .iter()
            .filter(|t| nodes.contains(&t.src) && nodes.contains(&t.dst))
            .collect()
    }

    /// Mask-based variant of [`Self::induced_transactions`] returning
    /// transaction indices; `member` must have one slot per node.
    pub fn induced_transaction_indices(&self, member: &[bool]) -> Vec<u32> {
        assert_eq!(member.len(), self.node_count(), "membership mask size");
        self.txns
            .iter()
            .enumerate()
            .filter(|(_, t)| member[t.src.index()] && member[t.dst.index()])
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Number of distinct undirected node pairs joined by at least one
    /// transaction (self-loops count as their own pair).
    pub fn distinct_edge_count(&self) -> usize {
        let mut pairs: HashSet<(u32, u32)> = HashSet::with_capacity(self.txns.len());
        for t in &self.txns {
            let (a, b) = if t.src.0 <= t.dst.0 {
                (t.src.0, t.dst.0)
            } else {
                (t.dst.0, t.src.0)
            };
            pairs.insert((a, b));
        }
        pairs.len()
    }

    /// Write the graph back out as `src,dst,value[,timestamp]` CSV. The
    /// timestamp column is present only when at least one transaction has one.
    pub fn export_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let with_ts = self.txns.iter().any(|t| t.timestamp.is_some());
        if with_ts {
            writeln!(w, "src,dst,value,timestamp")?;
        } else {
            writeln!(w, "src,dst,value")?;
        }
        for t in &self.txns {
            let src = &self.keys[t.src.index()];
            let dst = &self.keys[t.dst.index()];
            match (with_ts, t.timestamp) {
                (true, Some(ts)) => writeln!(w, "{src},{dst},{},{ts}", t.amount)?,
                (true, None) => writeln!(w, "{src},{dst},{},", t.amount)?,
                (false, _) => writeln!(w, "{src},{dst},{}", t.amount)?,
            }
        }
        Ok(())
    }
}
