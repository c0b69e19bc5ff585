//! Synthetic benchmark graphs: a user/object blockmodel with planted
//! single-digit clusters, and a Benford-behaved random-graph null model.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benford::{BenfordModel, Digit};
use crate::error::{Error, Result};
use crate::txgraph::{GraphBuilder, TransactionGraph};

pub const DEFAULT_SEED: u64 = 42;

/// Blockmodel layout: every cluster is a complete bipartite user/object
/// block; distinct clusters are joined by sparse random user-object edges.
/// Anomalous clusters transact with a single planted first digit, normal
/// clusters follow Benford.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub normal_clusters: usize,
    pub normal_cluster_size: usize,
    /// One entry per anomalous cluster.
    pub anomalous_sizes: Vec<usize>,
    /// Planted digit of each anomalous cluster; same length as
    /// `anomalous_sizes`.
    pub planted_digits: Vec<Digit>,
    /// Probability of each cross-cluster user-object edge.
    pub cross_p: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            normal_clusters: 6,
            normal_cluster_size: 80,
            anomalous_sizes: vec![80, 80, 80],
            planted_digits: vec![
                Digit::new(1).unwrap(),
                Digit::new(2).unwrap(),
                Digit::new(3).unwrap(),
            ],
            cross_p: 0.1,
            seed: DEFAULT_SEED,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.planted_digits.len() != self.anomalous_sizes.len() {
            return Err(Error::InvalidParameter(format!(
                "{} anomalous sizes but {} planted digits",
                self.anomalous_sizes.len(),
                self.planted_digits.len()
            )));
        }
        if !(0.0..=1.0).contains(&self.cross_p) {
            return Err(Error::InvalidParameter(format!(
                "cross_p must lie in [0, 1], got {}",
                self.cross_p
            )));
        }
        if self.normal_clusters > 0 && self.normal_cluster_size < 2 {
            return Err(Error::InvalidParameter(
                "normal clusters need at least 2 nodes".into(),
            ));
        }
        for &s in &self.anomalous_sizes {
            if s < 2 {
                return Err(Error::InvalidParameter(
                    "anomalous clusters need at least 2 nodes".into(),
                ));
            }
        }
        if self.normal_clusters + self.anomalous_sizes.len() == 0 {
            return Err(Error::InvalidParameter("no clusters requested".into()));
        }
        Ok(())
    }
}

/// Which nodes were planted where.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedGroundTruth {
    /// Node keys of each anomalous cluster.
    pub anomalous: Vec<Vec<String>>,
    /// Cluster id of every node.
    pub clusters: BTreeMap<String, usize>,
}

impl PlantedGroundTruth {
    /// All planted node keys, merged.
    pub fn anomalous_union(&self) -> std::collections::BTreeSet<String> {
        self.anomalous.iter().flatten().cloned().collect()
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }
}

struct Cluster {
    users: Vec<String>,
    objects: Vec<String>,
    planted: Option<Digit>,
}

fn amount_for(digit: Digit, rng: &mut ChaCha8Rng) -> f64 {
    // Mantissa is exactly the digit; magnitude spans five decades.
    digit.get() as f64 * 10f64.powi(rng.gen_range(0..=4))
}

/// Generate a blockmodel graph and its ground truth. Deterministic in the
/// spec, including the seed.
pub fn generate(spec: &SynthSpec) -> Result<(TransactionGraph, PlantedGroundTruth)> {
    spec.validate()?;
    let model = BenfordModel::standard();
    let mut master = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rng_digit = ChaCha8Rng::seed_from_u64(master.gen());
    let mut rng_amount = ChaCha8Rng::seed_from_u64(master.gen());
    let mut rng_cross = ChaCha8Rng::seed_from_u64(master.gen());

    let mut clusters = Vec::new();
    for ci in 0..spec.normal_clusters {
        clusters.push(build_cluster(ci, spec.normal_cluster_size, None));
    }
    for (ai, (&size, &digit)) in spec
        .anomalous_sizes
        .iter()
        .zip(spec.planted_digits.iter())
        .enumerate()
    {
        clusters.push(build_cluster(spec.normal_clusters + ai, size, Some(digit)));
    }

    let mut builder = GraphBuilder::new();
    let mut truth = PlantedGroundTruth {
        anomalous: Vec::new(),
        clusters: BTreeMap::new(),
    };
    for (ci, c) in clusters.iter().enumerate() {
        for key in c.users.iter().chain(c.objects.iter()) {
            builder.ensure_node(key);
            truth.clusters.insert(key.clone(), ci);
        }
        if c.planted.is_some() {
            truth
                .anomalous
                .push(c.users.iter().chain(c.objects.iter()).cloned().collect());
        }
    }

    // Within-cluster complete bipartite blocks.
    for c in &clusters {
        for u in &c.users {
            for o in &c.objects {
                let digit = match c.planted {
                    Some(d) => d,
                    None => model.sample_digit(&mut rng_digit),
                };
                let amount = amount_for(digit, &mut rng_amount);
                builder.add(u, o, amount, None)?;
            }
        }
    }
    // Sparse cross-cluster user-object edges, Benford-behaved.
    if spec.cross_p > 0.0 {
        for (ca, a) in clusters.iter().enumerate() {
            for (cb, b) in clusters.iter().enumerate() {
                if ca == cb {
                    continue;
                }
                for u in &a.users {
                    for o in &b.objects {
                        if rng_cross.gen::<f64>() < spec.cross_p {
                            let digit = model.sample_digit(&mut rng_digit);
                            let amount = amount_for(digit, &mut rng_amount);
                            builder.add(u, o, amount, None)?;
                        }
                    }
                }
            }
        }
    }
    Ok((builder.build()?, truth))
}

fn build_cluster(ci: usize, size: usize, planted: Option<Digit>) -> Cluster {
    let user_count = size.div_ceil(2);
    Cluster {
        users: (0..user_count).map(|j| format!("c{ci}_u{j}")).collect(),
        objects: (0..size - user_count).map(|j| format!("c{ci}_o{j}")).collect(),
        planted,
    }
}

/// Benford-behaved Erdos-Renyi graph: `n` nodes, each pair joined with
/// probability `avg_degree / (n - 1)`, random transaction direction, digits
/// sampled from the Benford distribution. Isolated nodes are kept.
pub fn generate_null(n: usize, avg_degree: f64, seed: u64) -> Result<TransactionGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "null graph needs at least 2 nodes, got {n}"
        )));
    }
    if avg_degree.is_nan() || avg_degree <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "average degree must be positive, got {avg_degree}"
        )));
    }
    let p = avg_degree / (n - 1) as f64;
    if p > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "average degree {avg_degree} is infeasible for {n} nodes"
        )));
    }
    let model = BenfordModel::standard();
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut rng_struct = ChaCha8Rng::seed_from_u64(master.gen());
    let mut rng_digit = ChaCha8Rng::seed_from_u64(master.gen());
    let mut rng_amount = ChaCha8Rng::seed_from_u64(master.gen());
    let mut rng_dir = ChaCha8Rng::seed_from_u64(master.gen());

    let mut builder = GraphBuilder::new();
    for i in 0..n {
        builder.ensure_node(&format!("n{i}"));
    }
    let mut emit = |builder: &mut GraphBuilder, v: usize, w: usize| -> Result<()> {
        let digit = model.sample_digit(&mut rng_digit);
        let amount = amount_for(digit, &mut rng_amount);
        let (src, dst) = if rng_dir.gen::<bool>() { (v, w) } else { (w, v) };
        builder.add(&format!("n{src}"), &format!("n{dst}"), amount, None)
    };
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                emit(&mut builder, v, w)?;
            }
        }
    } else {
        // Geometric skipping over the strictly-lower-triangular pair list.
        let lq = (1.0 - p).ln();
        let mut v: usize = 1;
        let mut w: i64 = -1;
        while v < n {
            let r: f64 = rng_struct.gen();
            let skip = ((1.0 - r).ln() / lq).floor();
            w = w.saturating_add(1).saturating_add(skip as i64);
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                emit(&mut builder, v, w as usize)?;
            }
        }
    }
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benford::{chi_square, DigitHistogram};
    use std::collections::HashSet;

    fn isolated_spec(p: f64) -> SynthSpec {
        SynthSpec {
            cross_p: p,
            ..SynthSpec::default()
        }
    }

    #[test]
    fn block_counts_are_exact_without_cross_edges() {
        let (g, truth) = generate(&isolated_spec(0.0)).unwrap();
        // Six normal 40x40 blocks plus three anomalous ones: 9 * 1600.
        assert_eq!(g.transaction_count(), 14_400);
        assert_eq!(g.node_count(), 9 * 80);
        assert_eq!(truth.anomalous.len(), 3);
        assert_eq!(truth.anomalous_union().len(), 240);
        // Every transaction stays inside its cluster and runs user->object.
        for t in g.transactions() {
            let src = g.key_of(t.src).unwrap();
            let dst = g.key_of(t.dst).unwrap();
            assert_eq!(truth.clusters[src], truth.clusters[dst]);
            assert!(src.contains("_u"));
            assert!(dst.contains("_o"));
        }
    }

    #[test]
    fn odd_sizes_split_users_up() {
        let spec = SynthSpec {
            normal_clusters: 1,
            normal_cluster_size: 5,
            anomalous_sizes: vec![3],
            planted_digits: vec![Digit::new(7).unwrap()],
            cross_p: 0.0,
            seed: 1,
        };
        let (g, truth) = generate(&spec).unwrap();
        // 3 users x 2 objects + 2 users x 1 object.
        assert_eq!(g.transaction_count(), 3 * 2 + 2);
        assert_eq!(truth.anomalous[0].len(), 3);
    }

    #[test]
    fn planted_clusters_use_a_single_digit() {
        let (g, truth) = generate(&isolated_spec(0.0)).unwrap();
        for (ai, keys) in truth.anomalous.iter().enumerate() {
            let set: HashSet<crate::txgraph::NodeId> =
                keys.iter().map(|k| g.node_by_key(k).unwrap()).collect();
            let hist: DigitHistogram = g
                .induced_transactions(&set)
                .iter()
                .map(|t| t.first_digit)
                .collect();
            let planted = SynthSpec::default().planted_digits[ai];
            assert_eq!(hist.count(planted), hist.total());
            assert_eq!(hist.total(), 1600);
        }
    }

    #[test]
    fn normal_clusters_follow_benford() {
        let (g, truth) = generate(&isolated_spec(0.0)).unwrap();
        let normal: HashSet<crate::txgraph::NodeId> = truth
            .clusters
            .iter()
            .filter(|&(_, &c)| c < 6)
            .map(|(k, _)| g.node_by_key(k).unwrap())
            .collect();
        let hist: DigitHistogram = g
            .induced_transactions(&normal)
            .iter()
            .map(|t| t.first_digit)
            .collect();
        assert_eq!(hist.total(), 9600);
        let freqs = hist.freqs();
        assert!((freqs[0] - 2f64.log10()).abs() < 0.02, "digit-1 freq {}", freqs[0]);
        // 9600 Benford samples give a central chi-square, nowhere near the
        // planted clusters' blowup.
        let chi = chi_square(&hist, &BenfordModel::standard());
        assert!(chi.statistic < 40.0, "chi {}", chi.statistic);
    }

    #[test]
    fn cross_edges_appear_at_the_requested_rate() {
        let (g, truth) = generate(&SynthSpec::default()).unwrap();
        let within = 14_400;
        let cross = g.transaction_count() - within;
        // 360 users x 360 objects minus the 14,400 within-cluster pairs.
        let cross_pairs = 360 * 360 - within;
        let expected = cross_pairs as f64 * 0.1;
        assert!(
            (cross as f64 - expected).abs() < 500.0,
            "cross {cross} vs expected {expected}"
        );
        // Cross transactions connect distinct clusters.
        let crossing = g
            .transactions()
            .iter()
            .filter(|t| {
                truth.clusters[g.key_of(t.src).unwrap()]
                    != truth.clusters[g.key_of(t.dst).unwrap()]
            })
            .count();
        assert_eq!(crossing, cross);
    }

    #[test]
    fn generation_is_deterministic_in_the_seed() {
        let (g1, t1) = generate(&SynthSpec::default()).unwrap();
        let (g2, t2) = generate(&SynthSpec::default()).unwrap();
        assert_eq!(g1.transactions(), g2.transactions());
        assert_eq!(g1.keys(), g2.keys());
        assert_eq!(t1, t2);
        let (g3, _) = generate(&SynthSpec { seed: 7, ..SynthSpec::default() }).unwrap();
        assert_ne!(g1.transactions(), g3.transactions());
    }

    #[test]
    fn spec_validation_rejects_nonsense() {
        for spec in [
            SynthSpec { planted_digits: vec![], ..SynthSpec::default() },
            SynthSpec { cross_p: 1.5, ..SynthSpec::default() },
            SynthSpec { cross_p: -0.1, ..SynthSpec::default() },
            SynthSpec { anomalous_sizes: vec![80, 80, 1], ..SynthSpec::default() },
            SynthSpec {
                normal_clusters: 0,
                anomalous_sizes: vec![],
                planted_digits: vec![],
                ..SynthSpec::default()
            },
        ] {
            assert!(generate(&spec).is_err(), "spec {spec:?} should fail");
        }
    }

    #[test]
    fn truth_json_round_trips() {
        let (_, truth) = generate(&isolated_spec(0.1)).unwrap();
        let json = serde_json::to_string(&truth).unwrap();
        let back: PlantedGroundTruth = serde_json::from_str(&json).unwrap();
        assert_eq!(truth, back);
    }

    #[test]
    fn null_graph_edge_count_and_structure() {
        let n = 2000;
        let g = generate_null(n, 20.0, 9).unwrap();
        assert_eq!(g.node_count(), n);
        let m = g.transaction_count();
        let expected = n as f64 * 20.0 / 2.0;
        assert!(
            (m as f64 - expected).abs() < 0.05 * expected,
            "{m} transactions vs expected {expected}"
        );
        // Each sampled pair appears at most once and never as a self-loop.
        assert_eq!(g.distinct_edge_count(), m);
        for t in g.transactions() {
            assert_ne!(t.src, t.dst);
        }
    }

    #[test]
    fn null_graph_digits_follow_benford() {
        let g = generate_null(3000, 40.0, 123).unwrap();
        let hist: DigitHistogram = g.transactions().iter().map(|t| t.first_digit).collect();
        let freqs = hist.freqs();
        let model = BenfordModel::standard();
        for (i, p) in model.probabilities().iter().enumerate() {
            assert!(
                (freqs[i] - p).abs() < 0.01,
                "digit {} freq {} vs {}",
                i + 1,
                freqs[i],
                p
            );
        }
    }

    #[test]
    fn null_graph_determinism_and_complete_case() {
        let a = generate_null(500, 12.0, 3).unwrap();
        let b = generate_null(500, 12.0, 3).unwrap();
        assert_eq!(a.transactions(), b.transactions());
        let c = generate_null(500, 12.0, 4).unwrap();
        assert_ne!(a.transactions(), c.transactions());
        // avg_degree = n - 1 yields the complete graph.
        let full = generate_null(6, 5.0, 1).unwrap();
        assert_eq!(full.transaction_count(), 15);
    }

    #[test]
    fn null_graph_parameter_errors() {
        assert!(generate_null(1, 1.0, 0).is_err());
        assert!(generate_null(10, 0.0, 0).is_err());
        assert!(generate_null(10, -2.0, 0).is_err());
        assert!(generate_null(10, 9.5, 0).is_err());
    }
}
