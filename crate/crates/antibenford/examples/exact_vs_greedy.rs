//! The densest-subgraph solvers side by side on small random weighted
//! graphs: exhaustive ground truth, the max-flow exact solver with its
//! certified gap, one-shot greedy peeling, and iterated peeling.

use antibenford::dsp::{brute_force_densest, exact_densest, greedy_peel, peel_iterations};
use antibenford::scoring::ReweightedGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    println!(
        "{:>4} {:>6} {:>9} {:>9} {:>9} {:>10} {:>9}",
        "n", "edges", "brute", "exact", "greedy", "greedy x12", "gap"
    );
    for _ in 0..10 {
        let n = rng.gen_range(6..=12);
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rng.gen::<f64>() < 0.45 {
                    edges.push((u, v, rng.gen_range(1..=40) as f64 / 4.0));
                }
            }
        }
        let g = ReweightedGraph::from_edges(n, &edges).unwrap();
        let brute = brute_force_densest(&g).unwrap();
        let exact = exact_densest(&g).unwrap();
        let (greedy, _) = greedy_peel(&g).unwrap();
        let multi = peel_iterations(&g, 12).unwrap();
        println!(
            "{n:>4} {:>6} {:>9.4} {:>9.4} {:>9.4} {:>10.4} {:>9.1e}",
            edges.len(),
            brute.density,
            exact.density,
            greedy.density,
            multi.density,
            exact.optimality_gap.unwrap(),
        );
    }
    println!("\ngreedy is never below half of brute; exact matches it to the gap.");
}
