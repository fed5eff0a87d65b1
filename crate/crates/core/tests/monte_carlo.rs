//! Seeded Monte Carlo checks of calibration, selection, and the full pipeline.

use rayon::prelude::*;

use sbm_twosample::community::{one_sample_statistic, select_num_communities, OneSampleResidual};
use sbm_twosample::graph_model::{sample_sbm, BlockProbabilityMatrix, CommunityLabeling};
use sbm_twosample::linalg::extreme_eigenvalues;
use sbm_twosample::sim::{null_density_scenario, run_replicates, DesignRegistry};
use sbm_twosample::tracy_widom::{tw1_moments, tw1_quantile};
use sbm_twosample::two_sample_test::BootstrapSetting;
use sbm_twosample::{run_two_sample_test, Decision, TestConfig};

fn critical() -> f64 {
    tw1_quantile(0.975).unwrap()
}

fn fraction(hits: usize, total: usize) -> f64 {
    hits as f64 / total as f64
}

fn one_block(p: f64) -> BlockProbabilityMatrix {
    BlockProbabilityMatrix::new(1, vec![p]).unwrap()
}

#[test]
fn one_sample_statistic_is_calibrated_under_one_block_null() {
    let (n, seeds) = (1000, 200);
    let g = CommunityLabeling::single(n);
    let b = one_block(0.3);
    let below = (0..seeds)
        .into_par_iter()
        .filter(|&s| one_sample_statistic(&sample_sbm(&g, &b, s).unwrap(), &g).unwrap() < critical())
        .count();
    assert!(fraction(below, seeds as usize) >= 0.90, "{below} of {seeds}");
}

#[test]
fn one_sample_statistic_detects_missing_block() {
    let (n, seeds) = (400, 100);
    let g = CommunityLabeling::balanced(n, 2).unwrap();
    let b = BlockProbabilityMatrix::planted(2, 0.5, 0.1).unwrap();
    let single = CommunityLabeling::single(n);
    let above = (0..seeds)
        .into_par_iter()
        .filter(|&s| one_sample_statistic(&sample_sbm(&g, &b, s).unwrap(), &single).unwrap() >= critical())
        .count();
    assert!(fraction(above, seeds as usize) >= 0.99, "{above} of {seeds}");
}

#[test]
fn true_parameter_edge_quantile_is_near_tw1() {
    let (n, seeds) = (1000, 500);
    let g = CommunityLabeling::balanced(n, 2).unwrap();
    let b = BlockProbabilityMatrix::planted(2, 0.4, 0.2).unwrap();
    let scale = (n as f64).powf(2.0 / 3.0);
    let mut edges: Vec<f64> = (0..seeds)
        .into_par_iter()
        .map(|s| {
            let a = sample_sbm(&g, &b, 50_000 + s).unwrap();
            let res = OneSampleResidual::new(&a, &g, &b).unwrap();
            scale * (extreme_eigenvalues(res.entries().as_ref()).unwrap().0 - 2.0)
        })
        .collect();
    edges.sort_by(f64::total_cmp);
    let q = edges[(0.975 * seeds as f64).ceil() as usize - 1];
    assert!((q - 1.454).abs() <= 0.5, "97.5th percentile {q}");
}

#[test]
fn selection_finds_three_planted_blocks() {
    let (n, seeds) = (600, 50);
    let g = CommunityLabeling::balanced(n, 3).unwrap();
    let b = BlockProbabilityMatrix::planted(3, 0.5, 0.1).unwrap();
    let hits = (0..seeds)
        .into_par_iter()
        .filter(|&s| select_num_communities(&sample_sbm(&g, &b, s).unwrap(), 0.05, 10, s).unwrap().selected == 3)
        .count();
    assert!(fraction(hits, seeds as usize) >= 0.90, "{hits} of {seeds}");
}

#[test]
fn selection_keeps_one_block_at_level() {
    let (n, seeds, alpha) = (300, 100, 0.05);
    let g = CommunityLabeling::single(n);
    let b = one_block(0.2);
    let hits = (0..seeds)
        .into_par_iter()
        .filter(|&s| select_num_communities(&sample_sbm(&g, &b, 900 + s).unwrap(), alpha, 10, s).unwrap().selected == 1)
        .count();
    assert!(fraction(hits, seeds as usize) >= 1.0 - alpha - 0.05, "{hits} of {seeds}");
}

fn fixed_one(seed: u64) -> TestConfig {
    TestConfig { fixed_k: Some((1, 1)), bootstrap: BootstrapSetting::Off, seed, ..TestConfig::default() }
}

#[test]
fn independent_null_pairs_fail_to_reject() {
    let (n, seeds) = (200, 100);
    let g = CommunityLabeling::single(n);
    let b = one_block(0.25);
    let kept = (0..seeds)
        .into_par_iter()
        .filter(|&s| {
            let x = sample_sbm(&g, &b, 2 * s).unwrap();
            let y = sample_sbm(&g, &b, 2 * s + 1).unwrap();
            run_two_sample_test(&x, &y, &fixed_one(s)).unwrap().decision == Decision::FailToReject
        })
        .count();
    assert!(fraction(kept, seeds as usize) >= 0.90, "{kept} of {seeds}");
}

#[test]
fn byte_identical_pair_is_rejected() {
    // X = Y gives residual entries with variance 2/(n-1), so lambda_1 sits near 2 * sqrt(2).
    let (n, seeds) = (200, 100);
    let g = CommunityLabeling::single(n);
    let b = one_block(0.25);
    let rejected = (0..seeds)
        .into_par_iter()
        .filter(|&s| {
            let x = sample_sbm(&g, &b, s).unwrap();
            run_two_sample_test(&x, &x, &fixed_one(s)).unwrap().decision == Decision::Reject
        })
        .count();
    assert!(fraction(rejected, seeds as usize) >= 0.99, "{rejected} of {seeds}");
}

#[test]
fn bootstrap_is_independent_of_thread_count() {
    let g = CommunityLabeling::balanced(120, 2).unwrap();
    let b = BlockProbabilityMatrix::planted(2, 0.4, 0.1).unwrap();
    let x = sample_sbm(&g, &b, 1).unwrap();
    let y = sample_sbm(&g, &b, 2).unwrap();
    let config = TestConfig { bootstrap: BootstrapSetting::Replicates(20), seed: 77, ..TestConfig::default() };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run_two_sample_test(&x, &y, &config).unwrap())
    };
    let (one, four) = (run(1), run(4));
    assert_eq!(one.t_n.to_bits(), four.t_n.to_bits());
    assert_eq!(one.t_n_boot.unwrap().to_bits(), four.t_n_boot.unwrap().to_bits());
    assert_eq!(one.ghat_x, four.ghat_x);
    assert_eq!(one.bootstrap, four.bootstrap);
}

#[test]
fn raw_null_statistic_sits_right_of_tw1_mean() {
    let scenario = null_density_scenario(600, 200, 21).with_bootstrap(BootstrapSetting::Off);
    let t: Vec<f64> = run_replicates(&scenario, &DesignRegistry::builtin()).unwrap().into_iter().map(|o| o.unwrap().t_n).collect();
    let mean = t.iter().sum::<f64>() / t.len() as f64;
    assert!(mean > tw1_moments().0, "mean T_n {mean}");
}
