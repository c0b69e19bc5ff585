//! Detect and render: print the rank-1 anomalous subgraph as Graphviz DOT.
//! Pipe it through `dot -Tsvg` to draw the cluster with node scores and
//! first-digit edge labels.

use antibenford::benford::{BenfordModel, Digit};
use antibenford::export::subgraph_dot;
use antibenford::pipeline::{detect_topk, DetectionConfig};
use antibenford::scoring::node_scores;
use antibenford::synthgen::{generate, SynthSpec};

fn main() {
    // Small clusters so the drawing stays legible.
    let spec = SynthSpec {
        normal_cluster_size: 12,
        anomalous_sizes: vec![8],
        planted_digits: vec![Digit::new(9).unwrap()],
        seed: 21,
        ..SynthSpec::default()
    };
    let (g, _) = generate(&spec).unwrap();
    let out = detect_topk(
        &g,
        &DetectionConfig {
            k: 1,
            ..DetectionConfig::default()
        },
    )
    .unwrap();
    let Some(report) = out.reports.first() else {
        eprintln!("nothing significant found");
        return;
    };
    let scores = node_scores(&g, &BenfordModel::standard());
    print!("{}", subgraph_dot(&g, &scores, report).unwrap());
}
