//! Acceptance gate for the whole artifact: ten end-to-end checks covering
//! the statistics, the solvers, the synthetic benchmark, the CLI, and the
//! resource envelope. Run with `--nocapture` to see one verdict line per
//! criterion.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use antibenford::benford::{
    chi_square, concentration_density_constant, BenfordModel, Digit, DigitHistogram,
};
use antibenford::dsp::{brute_force_densest, exact_densest, greedy_peel};
use antibenford::evalkit::{entropy_purity, f1};
use antibenford::pipeline::{detect_one, detect_topk, peeling_suffix_stats, DetectionConfig};
use antibenford::scoring::{node_scores, reweight, ReweightedGraph};
use antibenford::synthgen::{generate, generate_null, SynthSpec};

fn verdict(name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance {name} failed: {detail}");
}

#[test]
// The rounded five-digit reference values are the pinned contract here, not
// stand-ins for the exact constants.
#[allow(clippy::approx_constant)]
fn criterion_01_benford_pmf() {
    let m = BenfordModel::standard();
    let p = m.probabilities();
    let sum: f64 = p.iter().sum();
    let ok = (p[0] - 0.30103).abs() < 1e-5
        && (p[8] - 0.04576).abs() < 1e-5
        && (sum - 1.0).abs() < 1e-12;
    verdict(
        "01 benford-pmf",
        ok,
        &format!("p1={:.6} p9={:.6} sum-1={:+.2e}", p[0], p[8], sum - 1.0),
    );
}

#[test]
fn criterion_02_chi_square_null_mean() {
    let m = BenfordModel::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    let mut total = 0.0;
    let runs = 200;
    for _ in 0..runs {
        let mut h = DigitHistogram::new();
        for _ in 0..1000 {
            h.add(m.sample_digit(&mut rng));
        }
        total += chi_square(&h, &m).statistic;
    }
    let mean = total / runs as f64;
    verdict(
        "02 chi-square-null-mean",
        (7.0..=9.0).contains(&mean),
        &format!("mean over {runs} histograms = {mean:.3}, theory 8"),
    );
}

#[test]
fn criterion_03_psi_null_expectation() {
    let m = BenfordModel::standard();
    let n = 1000;
    let mut total = 0.0;
    let seeds = 50;
    for seed in 0..seeds {
        let g = generate_null(n, 20.0, 3000 + seed).unwrap();
        let hist: DigitHistogram = g.transactions().iter().map(|t| t.first_digit).collect();
        total += chi_square(&hist, &m).statistic / n as f64;
    }
    let mean = total / seeds as f64;
    let expected = 8.0 / n as f64;
    let rel = (mean - expected).abs() / expected;
    verdict(
        "03 psi-null-expectation",
        rel <= 0.30,
        &format!("mean psi(V) = {mean:.5}, theory {expected:.5}, rel err {rel:.2}"),
    );
}

#[test]
fn criterion_04_no_false_positives_under_null() {
    let m = BenfordModel::standard();
    let seeds = 50;
    let mut spurious = 0;
    let mut suffix_bad = 0;
    for seed in 0..seeds {
        let g = generate_null(1000, 40.0, 7000 + seed).unwrap();
        if detect_one(&g, &DetectionConfig::default())
            .unwrap()
            .is_some()
        {
            spurious += 1;
        }
        // Replay the greedy peeling order: every suffix of at least 20
        // nodes must keep its digit deviation below its transaction
        // density.
        let scores = node_scores(&g, &m);
        let rg = reweight(&g, &scores, false);
        let (_, trace) = greedy_peel(&rg).unwrap();
        let stats = peeling_suffix_stats(&g, &trace.removal_order).unwrap();
        if stats
            .iter()
            .any(|s| s.remaining >= 20 && s.psi > s.txn_density)
        {
            suffix_bad += 1;
        }
    }
    let ok = spurious as f64 <= 0.05 * seeds as f64 && suffix_bad as f64 <= 0.05 * seeds as f64;
    verdict(
        "04 no-false-positives",
        ok,
        &format!("{spurious}/{seeds} spurious detections, {suffix_bad}/{seeds} seeds with a deviant suffix"),
    );
}

#[test]
fn criterion_05_planted_recovery_f1() {
    let sizes = [20usize, 50, 80, 110];
    let seeds_per_size = 10;
    let mut lines = Vec::new();
    let mut ok = true;
    for &size in &sizes {
        let mut perfect = 0;
        for seed in 0..seeds_per_size {
            let spec = SynthSpec {
                anomalous_sizes: vec![size; 3],
                seed: 500 + seed,
                ..SynthSpec::default()
            };
            let (g, truth) = generate(&spec).unwrap();
            let out = detect_topk(
                &g,
                &DetectionConfig {
                    k: 3,
                    ..DetectionConfig::default()
                },
            )
            .unwrap();
            let detected: BTreeSet<String> = out
                .reports
                .iter()
                .flat_map(|r| r.nodes.iter().cloned())
                .collect();
            let score = f1(&detected, &truth.anomalous_union()).unwrap();
            if score.f1 == 1.0 {
                perfect += 1;
            }
        }
        lines.push(format!("size {size}: {perfect}/{seeds_per_size} perfect"));
        // Small clusters are allowed to hide; at 50 nodes and up the sweep
        // must recover them almost every time.
        if size >= 50 && perfect < 8 {
            ok = false;
        }
    }
    verdict("05 planted-recovery-f1", ok, &lines.join(", "));
}

#[test]
fn criterion_06_half_approximation_and_exact() {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(1414);
    let trials = 500;
    let mut greedy_violations = 0;
    let mut exact_violations = 0;
    for _ in 0..trials {
        let n = rng.gen_range(2..=14);
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rng.gen::<f64>() < 0.5 {
                    edges.push((u, v, rng.gen_range(1..=64) as f64 / 4.0));
                }
            }
        }
        let g = ReweightedGraph::from_edges(n, &edges).unwrap();
        let brute = brute_force_densest(&g).unwrap();
        let (greedy, _) = greedy_peel(&g).unwrap();
        if greedy.density < 0.5 * brute.density - 1e-12 {
            greedy_violations += 1;
        }
        let exact = exact_densest(&g).unwrap();
        if (exact.density - brute.density).abs() > 1e-6 {
            exact_violations += 1;
        }
    }
    verdict(
        "06 half-approximation",
        greedy_violations == 0 && exact_violations == 0,
        &format!(
            "{trials} graphs: {greedy_violations} greedy below 1/2 OPT, {exact_violations} exact-vs-brute mismatches"
        ),
    );
}

fn peak_rss_gib() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / (1024.0 * 1024.0))
}

#[test]
fn criterion_07_million_node_scalability() {
    let build = Instant::now();
    let g = generate_null(1_000_000, 10.0, 77).unwrap();
    let build_s = build.elapsed().as_secs_f64();
    assert!((4_900_000..=5_100_000).contains(&g.transaction_count()));
    let run = Instant::now();
    let out = detect_topk(
        &g,
        &DetectionConfig {
            k: 1,
            ..DetectionConfig::default()
        },
    )
    .unwrap();
    let run_s = run.elapsed().as_secs_f64();
    assert_eq!(out.global.node_count, 1_000_000);
    let peak = peak_rss_gib().unwrap_or(f64::NAN);
    let ok = run_s < 600.0 && peak < 8.0;
    verdict(
        "07 million-node-scalability",
        ok,
        &format!(
            "generate {build_s:.1}s, detect {run_s:.1}s (limit 600s), peak rss {peak:.2} GiB (limit 8)"
        ),
    );
}

fn run_cli(dir: &std::path::Path, args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_antibenford"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

#[test]
fn criterion_08_cli_byte_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let synth = |g: &str, t: &str| {
        run_cli(
            dir,
            &["synth", "--seed", "9", "--output", g, "--truth", t],
        )
    };
    let (_, c1) = synth("g1.csv", "t1.json");
    let (_, c2) = synth("g2.csv", "t2.json");
    assert_eq!((c1, c2), (0, 0));
    let graphs_equal = std::fs::read(dir.join("g1.csv")).unwrap()
        == std::fs::read(dir.join("g2.csv")).unwrap();
    let truths_equal = std::fs::read(dir.join("t1.json")).unwrap()
        == std::fs::read(dir.join("t2.json")).unwrap();

    let detect = |r: &str, d: &str, tr: &str| {
        run_cli(
            dir,
            &[
                "detect",
                "--input",
                "g1.csv",
                "--k",
                "3",
                "--output",
                r,
                "--digit-csv",
                d,
                "--trace",
                tr,
            ],
        )
    };
    let (stdout1, d1) = detect("r1.json", "d1.csv", "tr1.csv");
    let (stdout2, d2) = detect("r2.json", "d2.csv", "tr2.csv");
    assert_eq!((d1, d2), (0, 0));
    let detects_equal = stdout1 == stdout2
        && std::fs::read(dir.join("r1.json")).unwrap() == std::fs::read(dir.join("r2.json")).unwrap()
        && std::fs::read(dir.join("d1.csv")).unwrap() == std::fs::read(dir.join("d2.csv")).unwrap()
        && std::fs::read(dir.join("tr1.csv")).unwrap()
            == std::fs::read(dir.join("tr2.csv")).unwrap();
    verdict(
        "08 cli-byte-determinism",
        graphs_equal && truths_equal && detects_equal,
        &format!("synth outputs identical: {}, detect outputs identical: {detects_equal}",
            graphs_equal && truths_equal),
    );
}

#[test]
fn criterion_09_digit_concentration_on_dense_nulls() {
    let m = BenfordModel::standard();
    let n = 1300usize;
    // The concentration regime: average degree at least
    // 36/(p_min eps^2) * ln(n)/18 at eps = 1/2, scaled down to a size the
    // suite can afford.
    let c = concentration_density_constant(&m, 0.5).unwrap();
    let avg = c * (n as f64).ln() / 18.0;
    assert!(avg <= (n - 1) as f64, "regime must stay feasible: {avg}");
    let trials = 100;
    let mut violations = 0;
    for trial in 0..trials {
        let g = generate_null(n, avg, 880_000 + trial).unwrap();
        let hist: DigitHistogram = g.transactions().iter().map(|t| t.first_digit).collect();
        let e = g.transaction_count() as f64;
        for d in Digit::all() {
            let x = hist.count(d) as f64;
            let mean = m.probability(d) * e;
            if x < 0.5 * mean || x > 1.5 * mean {
                violations += 1;
            }
        }
    }
    verdict(
        "09 digit-concentration",
        violations == 0,
        &format!("{trials} dense null graphs (avg degree {avg:.0}): {violations} digit counts outside (1 +/- 1/2) of expectation"),
    );
}

#[test]
fn criterion_10_entropy_purity_metric() {
    use std::collections::BTreeMap;
    let mut labels = BTreeMap::new();
    let mut nodes = BTreeSet::new();
    for i in 0..50 {
        labels.insert(format!("a{i}"), "left".to_string());
        labels.insert(format!("b{i}"), "right".to_string());
        nodes.insert(format!("a{i}"));
        nodes.insert(format!("b{i}"));
    }
    let even = entropy_purity(&nodes, &labels).unwrap();
    let single: BTreeSet<String> = (0..50).map(|i| format!("a{i}")).collect();
    let pure = entropy_purity(&single, &labels).unwrap();
    let ok = (even.entropy - std::f64::consts::LN_2).abs() < 1e-9 && pure.entropy == 0.0;
    verdict(
        "10 entropy-purity",
        ok,
        &format!(
            "50/50 entropy {} (ln 2 = {}), single-label entropy {:?}",
            even.entropy,
            std::f64::consts::LN_2,
            pure.entropy
        ),
    );
}
