#![allow(dead_code)]

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sbm_twosample::community::estimate_block_matrix;
use sbm_twosample::graph_model::{sample_sbm, AdjacencyMatrix, BlockProbabilityMatrix, CommunityLabeling};
use sbm_twosample::two_sample_test::{test_statistic, PluginProbabilities};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Labels with every community holding at least `min_size` nodes, in random order.
pub fn random_labels(rng: &mut ChaCha8Rng, n: usize, k: usize, min_size: usize) -> CommunityLabeling {
    assert!(n >= k * min_size);
    let mut labels: Vec<usize> = (0..k * min_size).map(|i| i % k).collect();
    labels.extend((k * min_size..n).map(|_| rng.random_range(0..k)));
    labels.shuffle(rng);
    CommunityLabeling::new(labels, k).unwrap()
}

pub fn random_block(rng: &mut ChaCha8Rng, k: usize, lo: f64, hi: f64) -> BlockProbabilityMatrix {
    let mut entries = vec![0.0; k * k];
    for u in 0..k {
        for v in u..k {
            let p = rng.random_range(lo..hi);
            entries[u * k + v] = p;
            entries[v * k + u] = p;
        }
    }
    BlockProbabilityMatrix::new(k, entries).unwrap()
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Edge fractions per block pair counted over unordered node pairs.
pub fn rational_block_oracle(a: &AdjacencyMatrix, g: &CommunityLabeling) -> Vec<Vec<Ratio<u64>>> {
    let k = g.num_communities();
    let mut edges = vec![vec![0u64; k]; k];
    let mut pairs = vec![vec![0u64; k]; k];
    for i in 0..a.n() {
        for j in (i + 1)..a.n() {
            let (u, v) = (g.label(i), g.label(j));
            pairs[u][v] += 1;
            if u != v {
                pairs[v][u] += 1;
            }
            if a.has_edge(i, j) {
                edges[u][v] += 1;
                if u != v {
                    edges[v][u] += 1;
                }
            }
        }
    }
    (0..k)
        .map(|u| (0..k).map(|v| Ratio::new(edges[u][v], pairs[u][v])).collect())
        .collect()
}

/// Correctly rounded `f64` of a ratio of integers below 2^53.
pub fn round_ratio(r: &Ratio<u64>) -> f64 {
    assert!(*r.denom() < (1 << 53));
    *r.numer() as f64 / *r.denom() as f64
}

/// Count of block entries where the estimator differs bitwise from the oracle.
pub fn oracle_mismatches(a: &AdjacencyMatrix, g: &CommunityLabeling) -> usize {
    let b = estimate_block_matrix(a, g).unwrap();
    let oracle = rational_block_oracle(a, g);
    let k = g.num_communities();
    let mut bad = 0;
    for u in 0..k {
        for v in 0..k {
            if b.get(u, v).to_bits() != round_ratio(&oracle[u][v]).to_bits() {
                bad += 1;
            }
        }
    }
    bad
}

/// Random 10-node instance for the estimator oracle.
pub fn oracle_instance(seed: u64) -> (AdjacencyMatrix, CommunityLabeling) {
    let mut r = rng(seed);
    let k = r.random_range(1..=4);
    let g = random_labels(&mut r, 10, k, 2);
    let b = random_block(&mut r, k, 0.0, 1.0);
    let a = sample_sbm(&g, &b, r.random()).unwrap();
    (a, g)
}

/// `T_n` with the labelings held fixed.
pub fn statistic_with_labels(x: &AdjacencyMatrix, y: &AdjacencyMatrix, g_x: &CommunityLabeling, g_y: &CommunityLabeling) -> f64 {
    let b_x = estimate_block_matrix(x, g_x).unwrap();
    let b_y = estimate_block_matrix(y, g_y).unwrap();
    let p = PluginProbabilities::from_estimates(g_x, &b_x, g_y, &b_y).unwrap();
    test_statistic(&p.residual(x, y).unwrap()).unwrap()
}

/// A pair of graphs with independent random models on a shared node set.
pub struct Instance {
    pub x: AdjacencyMatrix,
    pub y: AdjacencyMatrix,
    pub g_x: CommunityLabeling,
    pub g_y: CommunityLabeling,
}

pub fn permutation_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let n = r.random_range(30..80);
    let (k_x, k_y) = (r.random_range(1..=4), r.random_range(1..=4));
    let g_x = random_labels(&mut r, n, k_x, 3);
    let g_y = random_labels(&mut r, n, k_y, 3);
    let b_x = random_block(&mut r, k_x, 0.05, 0.6);
    let b_y = random_block(&mut r, k_y, 0.05, 0.6);
    let x = sample_sbm(&g_x, &b_x, r.random()).unwrap();
    let y = sample_sbm(&g_y, &b_y, r.random()).unwrap();
    Instance { x, y, g_x, g_y }
}

pub fn relative_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len();
    if m % 2 == 1 {
        xs[m / 2]
    } else {
        0.5 * (xs[m / 2 - 1] + xs[m / 2])
    }
}
