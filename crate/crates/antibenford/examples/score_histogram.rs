//! The s(u)/deg(u) distribution that separates honest accounts from planted
//! ones: honest nodes pile into the low geometric bins, anomalous clusters
//! form a detached tail.

use antibenford::benford::BenfordModel;
use antibenford::evalkit::{score_degree_histogram, BinningSpec};
use antibenford::scoring::node_scores;
use antibenford::synthgen::{generate, SynthSpec};

fn main() {
    let (g, _) = generate(&SynthSpec::default()).unwrap();
    let table = node_scores(&g, &BenfordModel::standard());
    let hist = score_degree_histogram(&table, &BinningSpec::Auto { bins: 16 }).unwrap();

    let peak = hist.counts.iter().copied().max().unwrap_or(1).max(1);
    println!("s(u)/deg(u) over {} nodes with degree >= 1:", hist.total());
    for (i, &c) in hist.counts.iter().enumerate() {
        println!(
            "  [{:>8.3}, {:>8.3})  {:>4}  {}",
            hist.edges[i],
            hist.edges[i + 1],
            c,
            "#".repeat((c * 56 / peak) as usize),
        );
    }
}
