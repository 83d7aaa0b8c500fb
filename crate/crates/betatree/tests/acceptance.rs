//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test -p betatree --test acceptance -- --nocapture` to see
//! them all). Thresholds and tolerances are pinned in the asserts.

mod common;

use std::time::Instant;

use betatree::beta::{beta_cdf, beta_quantile, BetaParams};
use betatree::config::{trim_count_for_fraction, Config, RootMode};
use betatree::harness::{
    bin_count_study, coverage_check, pivot_check, rep_seed, sample_mixture, sample_uniform_cube,
    width_bound_check, MixtureSpec, Target,
};
use betatree::inference::{extract_betatree, extract_betatree_iterative, infer, plan_alphas};
use betatree::modes::{build_adjacency, find_modes};
use betatree::partition::build_kdtree;

use common::{median_usize, oracle_beta_cdf, oracle_modes, random_beta_tree, OracleBin};

fn report(criterion: &str, pass: bool, details: &str) {
    println!(
        "criterion {criterion}: {} — {details}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {details}");
}

#[test]
fn criterion_01_pivot_exactness() {
    let start = Instant::now();
    let cases = [(100usize, 2usize, 1u64), (100, 2, 7), (100, 3, 1)];
    let mut details = String::new();
    let mut pass = true;
    for (n, d, k) in cases {
        let r = pivot_check(n, d, k, 2000, 1001).expect("pivot run");
        details.push_str(&format!(
            "[n={n} d={d} k={k}: n_k={} p={:.4}] ",
            r.node_count, r.p_value
        ));
        pass &= r.p_value > 0.01;
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 30.0;
    details.push_str(&format!("elapsed {elapsed:.2?} (target < 30 s)"));
    report("01 (pivot exactness)", pass, &details);
}

#[test]
fn criterion_02_simultaneous_coverage() {
    let start = Instant::now();
    let r = coverage_check(
        &Target::UniformCube { dim: 2 },
        1000,
        0.1,
        &Config::default(),
        1000,
        2002,
    )
    .expect("coverage run");
    let threshold = 0.90 - 2.0 * (0.9f64 * 0.1 / 1000.0).sqrt();
    let elapsed = start.elapsed();
    let pass = r.coverage_rate >= threshold && elapsed.as_secs_f64() < 300.0;
    report(
        "02 (simultaneous coverage)",
        pass,
        &format!(
            "rate {:.4} (se {:.4}) >= {threshold:.4} over {} reps, elapsed {elapsed:.2?} (target < 5 min)",
            r.coverage_rate, r.std_error, r.replications
        ),
    );
}

#[test]
fn criterion_03_ci_width_envelope() {
    let cfg = Config { root_mode: RootMode::FullSpace, ..Config::default() };
    let mut eligible = 0usize;
    let mut violations = 0usize;
    let mut eligible_wide = 0usize;
    let mut violations_wide = 0usize;
    for rep in 0..20 {
        let data = sample_uniform_cube(10_000, 2, rep_seed(3003, rep));
        let tree = build_kdtree(data, &cfg).expect("build");
        let inf = infer(&tree, 0.1).expect("infer");
        let r = width_bound_check(&tree, &inf, 0.5);
        eligible += r.eligible;
        violations += r.violations;
        // supplementary: q = 0.7 puts real node counts inside the regime
        let rw = width_bound_check(&tree, &inf, 0.7);
        eligible_wide += rw.eligible;
        violations_wide += rw.violations;
    }
    let pass = violations == 0 && violations_wide == 0;
    report(
        "03 (CI width envelope)",
        pass,
        &format!(
            "q=0.5: {violations} violations / {eligible} eligible; \
             supplementary q=0.7: {violations_wide} violations / {eligible_wide} eligible, 20 seeds"
        ),
    );
}

#[test]
fn criterion_04_uniform_parsimony() {
    let cfg = Config {
        trim_count: trim_count_for_fraction(0.005, 1000),
        ..Config::default()
    };
    assert_eq!(cfg.trim_count, 5);
    let counts = bin_count_study(&Target::UniformCube { dim: 2 }, 1000, 0.1, &cfg, 200, 4004)
        .expect("study");
    let single = counts.iter().filter(|&&c| c == 1).count();
    let median = median_usize(&counts);
    let pass = single as f64 >= 0.8 * counts.len() as f64 && median == 1;
    report(
        "04 (uniform parsimony)",
        pass,
        &format!("single bin in {single}/{} replications, median {median}", counts.len()),
    );
}

#[test]
fn criterion_05_mixture_bin_counts() {
    let cfg = Config { root_mode: RootMode::FullSpace, ..Config::default() };
    let c2 = bin_count_study(
        &Target::Mixture(MixtureSpec::scenario_2d()),
        2000,
        0.1,
        &cfg,
        50,
        5005,
    )
    .expect("2-d study");
    let m2 = median_usize(&c2);
    let c3 = bin_count_study(
        &Target::Mixture(MixtureSpec::scenario_3d()),
        20_000,
        0.1,
        &cfg,
        20,
        5006,
    )
    .expect("3-d study");
    let m3 = median_usize(&c3);
    let pass = (15..=45).contains(&m2) && (60..=250).contains(&m3);
    report(
        "05 (mixture bin counts)",
        pass,
        &format!("2-d median {m2} in [15,45] over 50 seeds; 3-d median {m3} in [60,250] over 20 seeds"),
    );
}

fn modes_recovered(
    spec: &MixtureSpec,
    n: usize,
    truth: &[&[f64]],
    seed: u64,
    reps: usize,
) -> usize {
    let cfg = Config { root_mode: RootMode::FullSpace, ..Config::default() };
    let mut hits = 0;
    for rep in 0..reps {
        let data = sample_mixture(spec, n, rep_seed(seed, rep));
        let tree = build_kdtree(data, &cfg).expect("build");
        let inf = infer(&tree, 0.1).expect("infer");
        let bt = extract_betatree(&tree, &inf).expect("extract");
        let graph = build_adjacency(&bt);
        let found = find_modes(&bt, &graph, 6);
        if found.modes.len() != truth.len() {
            continue;
        }
        let centers: Vec<Vec<f64>> = found
            .modes
            .iter()
            .map(|&m| bt.bins[m].rect.center())
            .collect();
        let all_matched = truth.iter().all(|t| {
            centers.iter().any(|c| {
                c.iter()
                    .zip(t.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
                    <= 1.0
            })
        });
        if all_matched {
            hits += 1;
        }
    }
    hits
}

#[test]
fn criterion_06_mode_recovery() {
    let hits2 = modes_recovered(
        &MixtureSpec::scenario_2d(),
        2000,
        &[&[-1.5, 0.6], &[2.0, -1.5]],
        6006,
        50,
    );
    let hits3 = modes_recovered(
        &MixtureSpec::scenario_3d(),
        20_000,
        &[&[-1.5, 0.6, 1.0], &[2.0, -1.5, 0.0], &[-2.6, -3.0, -2.0]],
        6007,
        20,
    );
    let pass = hits2 >= 40 && hits3 >= 14;
    report(
        "06 (mode recovery)",
        pass,
        &format!("2-d: both modes within L-inf 1.0 in {hits2}/50 (need 40); 3-d: {hits3}/20 (need 14)"),
    );
}

#[test]
fn criterion_07_mode_search_oracle_equivalence() {
    let mut mismatches = 0;
    for seed in 0..500u64 {
        let d = 1 + (seed % 3) as usize;
        let n_bins = 2 + (seed % 7) as usize;
        let bt = random_beta_tree(seed, d, n_bins);
        let graph = build_adjacency(&bt);
        let bins: Vec<OracleBin> = bt
            .bins
            .iter()
            .map(|b| OracleBin { density: b.density, lower: b.lower, upper: b.upper })
            .collect();
        let neighbors: Vec<Vec<usize>> =
            (0..bt.bins.len()).map(|i| graph.neighbors(i).to_vec()).collect();
        let max_len = n_bins - 1;
        if find_modes(&bt, &graph, max_len).modes != oracle_modes(&bins, &neighbors, max_len) {
            mismatches += 1;
        }
    }
    report(
        "07 (mode-search oracle equivalence)",
        mismatches == 0,
        &format!("{mismatches} mismatches over 500 synthetic histograms of <= 8 bins"),
    );
}

#[test]
fn criterion_08_beta_kernel_accuracy() {
    let qs = [0.001, 0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999];
    let shapes = [1.0, 2.0, 5.0, 10.0, 50.0, 100.0, 1e3, 1e4, 5e4, 1e5];
    let mut worst_round_trip = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut triples = 0;
    for &a in &shapes {
        for &b in &shapes {
            let p = BetaParams::new(a, b).unwrap();
            for &q in &qs {
                triples += 1;
                let x = beta_quantile(q, &p).expect("quantile");
                let back = beta_cdf(x, &p).expect("cdf");
                worst_round_trip = worst_round_trip.max((back - q).abs());
                let oracle = oracle_beta_cdf(x, a, b);
                let rel = (back - oracle).abs() / oracle.max(1e-300);
                worst_oracle = worst_oracle.max(rel);
            }
        }
    }
    let pass = worst_round_trip <= 1e-9 && worst_oracle <= 1e-8;
    report(
        "08 (beta kernel accuracy)",
        pass,
        &format!(
            "{triples} (q,a,b) triples: worst round trip {worst_round_trip:.2e} (<= 1e-9), \
             worst oracle disagreement {worst_oracle:.2e} relative (<= 1e-8)"
        ),
    );
}

#[test]
fn criterion_09_structural_invariants() {
    let mut datasets = 0;
    let mut child_count_ok = true;
    let mut extraction_ok = true;
    let mut budget_ok = true;
    for seed in 0..50u64 {
        for cfg in [
            Config::default(),
            Config { root_mode: RootMode::FullSpace, ..Config::default() },
        ] {
            datasets += 1;
            let n = 200 + (seed as usize * 37) % 900;
            let d = 1 + (seed as usize % 3);
            let data = sample_uniform_cube(n, d, rep_seed(9009, datasets));
            let tree = build_kdtree(data, &cfg).expect("build");
            for (slot, node) in tree.nodes().iter().enumerate() {
                if let Some((l, r)) = tree.children(slot) {
                    let half = node.count.div_ceil(2);
                    child_count_ok &= tree.node(l).count == half - 1;
                    child_count_ok &= tree.node(r).count == node.count - half;
                }
            }
            let inf = infer(&tree, 0.1).expect("infer");
            let rec = extract_betatree(&tree, &inf);
            let it = extract_betatree_iterative(&tree, &inf);
            match (rec, it) {
                (Ok(a), Ok(b)) => {
                    extraction_ok &= a.bins.iter().map(|x| x.node_index).collect::<Vec<_>>()
                        == b.bins.iter().map(|x| x.node_index).collect::<Vec<_>>();
                }
                (Err(_), Err(_)) => {}
                _ => extraction_ok = false,
            }
            let plan = plan_alphas(&tree, 0.1).expect("plan");
            let budget = plan.budget();
            budget_ok &= budget <= 0.1 + 1e-12;
            if cfg.root_mode == RootMode::BoundingBox {
                let all_populated = (1..=plan.d_max).all(|dd| plan.n_bounded[dd as usize] > 0);
                if all_populated {
                    budget_ok &= (budget - 0.1).abs() < 1e-12;
                }
            }
        }
    }
    let pass = child_count_ok && extraction_ok && budget_ok;
    report(
        "09 (structural invariants)",
        pass,
        &format!(
            "{datasets} datasets: child-count recursion {child_count_ok}, \
             recursive==iterative extraction {extraction_ok}, level budget {budget_ok}"
        ),
    );
}

#[test]
fn criterion_10_performance_smoke() {
    let cfg = Config { root_mode: RootMode::FullSpace, ..Config::default() };
    let time_build = |n: usize| {
        let data = sample_uniform_cube(n, 4, 1010);
        let start = Instant::now();
        let tree = build_kdtree(data, &cfg).expect("build");
        let inf = infer(&tree, 0.1).expect("infer");
        assert_eq!(inf.nodes.len(), tree.len());
        start.elapsed()
    };
    // warm-up pass so allocator and thread pool startup don't pollute ratios
    let _ = time_build(100_000);
    let t_half = time_build(500_000);
    let t_full = time_build(1_000_000);
    let pass = t_full.as_secs_f64() < 10.0
        && t_full.as_secs_f64() < 3.0 * t_half.as_secs_f64().max(1e-9);
    report(
        "10 (performance smoke)",
        pass,
        &format!(
            "n=1e6, d=4 tree+CIs in {t_full:.2?} (target < 10 s); \
             n doubling 5e5 -> 1e6 scales {t_half:.2?} -> {t_full:.2?} (factor < 3)"
        ),
    );
}
