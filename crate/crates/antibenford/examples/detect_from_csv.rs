//! Run detection on a transaction CSV (`src,dst,value[,timestamp]`):
//!
//! ```text
//! cargo run --example detect_from_csv -- path/to/transactions.csv
//! ```
//!
//! Without an argument a small embedded ledger is used: four mule accounts
//! shuffling nine-prefixed amounts inside ordinary customer traffic.

use antibenford::benford::BenfordModel;
use antibenford::pipeline::{detect_topk, render_table, DetectionConfig};
use antibenford::txgraph::{IngestConfig, TransactionGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn demo_csv() -> String {
    let model = BenfordModel::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut s = String::from("src,dst,value\n");
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                s += &format!("mule{i},mule{j},{}\n", 9000 + rng.gen_range(0..999));
            }
        }
    }
    for _ in 0..60 {
        let a = rng.gen_range(0..20);
        let mut b = rng.gen_range(0..20);
        while b == a {
            b = rng.gen_range(0..20);
        }
        let digit = model.sample_digit(&mut rng).get() as u64;
        let amount = digit * 10u64.pow(rng.gen_range(1..4)) + rng.gen_range(0..10);
        s += &format!("cust{a:02},cust{b:02},{amount}\n");
    }
    s
}

fn main() {
    let ingest = IngestConfig::default();
    let (graph, summary) = match std::env::args().nth(1) {
        Some(path) => TransactionGraph::load_csv(&path, &ingest).expect("readable CSV"),
        None => TransactionGraph::load_csv_from_reader(demo_csv().as_bytes(), &ingest).unwrap(),
    };
    println!(
        "{} transactions over {} nodes ({} rows dropped)\n",
        graph.transaction_count(),
        graph.node_count(),
        summary.rows_read - summary.kept,
    );

    let config = DetectionConfig {
        k: 3,
        ..DetectionConfig::default()
    };
    let output = detect_topk(&graph, &config).unwrap();
    print!("{}", render_table(&output));
    match output.reports.first() {
        Some(top) => println!("\nrank 1 members: {:?}", top.nodes),
        None => println!("\nno statistically significant anomalous subgraph found"),
    }
}
