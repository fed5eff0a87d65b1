//! Community structure from a single network: spectral clustering, the block
//! probability estimator, the one-sample extreme-eigenvalue statistic, and
//! sequential selection of the number of communities.

use faer::Mat;

use crate::error::{Error, Result};
use crate::graph_model::{AdjacencyMatrix, BlockProbabilityMatrix, CommunityLabeling};
use crate::kmeans::{self, KMeansConfig};
use crate::linalg::{self, SpectralEmbedding};
use crate::seed;
use crate::tracy_widom;

/// Edge and pair counts per ordered block pair.
///
/// `edges[u][v]` sums `A[i][j]` over `i` in block `u`, `j` in block `v`
/// (ordered pairs, so within-block edges are counted twice); `pairs[u][v]` is
/// `n_u * n_v` off the diagonal and `n_u * (n_u - 1)` on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockEdgeCounts {
    pub k: usize,
    pub edges: Vec<u64>,
    pub pairs: Vec<u64>,
}

impl BlockEdgeCounts {
    pub fn new(a: &AdjacencyMatrix, g: &CommunityLabeling) -> Result<Self> {
        check_labels(a, g)?;
        let k = g.num_communities();
        let mut edges = vec![0u64; k * k];
        for i in 0..a.n() {
            let gi = g.label(i);
            for (j, &e) in a.row(i).iter().enumerate() {
                if e != 0 {
                    edges[gi * k + g.label(j)] += 1;
                }
            }
        }
        let sizes = g.community_sizes();
        let mut pairs = vec![0u64; k * k];
        for u in 0..k {
            for v in 0..k {
                let (nu, nv) = (sizes[u] as u64, sizes[v] as u64);
                pairs[u * k + v] = if u == v { nu * nu.saturating_sub(1) } else { nu * nv };
            }
        }
        Ok(Self { k, edges, pairs })
    }
}

fn check_labels(a: &AdjacencyMatrix, g: &CommunityLabeling) -> Result<()> {
    if a.n() != g.len() {
        return Err(Error::Config(format!("labeling covers {} nodes but the graph has {}", g.len(), a.n())));
    }
    Ok(())
}

/// Maximum likelihood estimate of `B` given the labeling: the fraction of
/// realised edges among the available node pairs of each block pair.
pub fn estimate_block_matrix(a: &AdjacencyMatrix, g: &CommunityLabeling) -> Result<BlockProbabilityMatrix> {
    let counts = BlockEdgeCounts::new(a, g)?;
    let sizes = g.community_sizes();
    if let Some(u) = sizes.iter().position(|&s| s < 2) {
        return Err(Error::DegenerateCommunity { community: u + 1, size: sizes[u] });
    }
    let entries = counts
        .edges
        .iter()
        .zip(&counts.pairs)
        .map(|(&e, &p)| e as f64 / p as f64)
        .collect();
    BlockProbabilityMatrix::new(counts.k, entries)
}

/// Bounds `[1/(n(n-1)), 1 - 1/(n(n-1))]` applied to plug-in probabilities.
pub fn probability_bounds(n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Config(format!("need at least 2 nodes, got {n}")));
    }
    let eps = 1.0 / (n as f64 * (n as f64 - 1.0));
    Ok((eps, 1.0 - eps))
}

/// Spectral clustering on the adjacency matrix: k-means on the rows of the
/// eigenvectors belonging to the `k` largest-magnitude eigenvalues.
pub fn spectral_clustering(a: &AdjacencyMatrix, k: usize, seed: u64) -> Result<CommunityLabeling> {
    if k == 0 || k > a.n() {
        return Err(Error::Config(format!("cannot form {k} communities from {} nodes", a.n())));
    }
    if k == 1 {
        return Ok(CommunityLabeling::single(a.n()));
    }
    let embedding = SpectralEmbedding::new(a.to_mat().as_ref())?;
    cluster_embedding(&embedding, k, seed)
}

/// Spectral clustering step on a precomputed eigendecomposition.
pub fn cluster_embedding(embedding: &SpectralEmbedding, k: usize, seed: u64) -> Result<CommunityLabeling> {
    let n = embedding.values().len();
    if k == 0 || k > n {
        return Err(Error::Config(format!("cannot form {k} communities from {n} nodes")));
    }
    if k == 1 {
        return Ok(CommunityLabeling::single(n));
    }
    let clustering = kmeans::kmeans(&embedding.rows(k), k, seed, KMeansConfig::default())?;
    CommunityLabeling::new(clustering.assignment, k)
}

/// Centered and rescaled single adjacency matrix,
/// `(A_ij - P_ij) / sqrt((n-1) P_ij (1 - P_ij))` off the diagonal, with
/// `P_ij = B[g(i)][g(j)]` clamped into the plug-in bounds.
#[derive(Debug, Clone)]
pub struct OneSampleResidual {
    entries: Mat<f64>,
}

impl OneSampleResidual {
    pub fn new(a: &AdjacencyMatrix, g: &CommunityLabeling, b: &BlockProbabilityMatrix) -> Result<Self> {
        check_labels(a, g)?;
        if g.num_communities() != b.dim() {
            return Err(Error::Config(format!(
                "labeling has {} communities but B is {}x{}",
                g.num_communities(),
                b.dim(),
                b.dim()
            )));
        }
        let n = a.n();
        let (lo, hi) = probability_bounds(n)?;
        let scale: Vec<f64> = (0..b.dim() * b.dim())
            .map(|uv| {
                let p = b.get(uv / b.dim(), uv % b.dim()).clamp(lo, hi);
                ((n as f64 - 1.0) * p * (1.0 - p)).sqrt()
            })
            .collect();
        let entries = Mat::from_fn(n, n, |i, j| {
            if i == j {
                return 0.0;
            }
            let (u, v) = (g.label(i), g.label(j));
            let p = b.get(u, v).clamp(lo, hi);
            (a.get(i, j) as f64 - p) / scale[u * b.dim() + v]
        });
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &Mat<f64> {
        &self.entries
    }

    /// `max{n^(2/3)(lambda_1 - 2), n^(2/3)(-lambda_n - 2)}`.
    pub fn statistic(&self) -> Result<f64> {
        let (hi, lo) = linalg::extreme_eigenvalues(self.entries.as_ref())?;
        Ok(scaled_edge_statistic(self.entries.nrows(), hi, lo))
    }
}

/// `n^(2/3) (max(lambda_1, -lambda_n) - 2)`.
pub(crate) fn scaled_edge_statistic(n: usize, largest: f64, smallest: f64) -> f64 {
    let scale = (n as f64).powf(2.0 / 3.0);
    (scale * (largest - 2.0)).max(scale * (-smallest - 2.0))
}

/// One-sample statistic for `H0: K = K0` with `g` a `K0`-community labeling.
pub fn one_sample_statistic(a: &AdjacencyMatrix, g: &CommunityLabeling) -> Result<f64> {
    probability_bounds(a.n())?;
    let b = estimate_block_matrix(a, g)?;
    OneSampleResidual::new(a, g, &b)?.statistic()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KSelectionStep {
    pub k0: usize,
    pub statistic: f64,
    pub critical: f64,
    pub rejected: bool,
}

/// Record of the sequential tests `H0: K = K0` vs `H1: K > K0`.
#[derive(Debug, Clone)]
pub struct KSelectionTrace {
    pub tried: Vec<KSelectionStep>,
    pub selected: usize,
    /// Every `K0 <= K_max` was rejected; `selected` is then `K_max`.
    pub exhausted: bool,
    /// Labeling produced by spectral clustering at the selected `K0`.
    pub labeling: CommunityLabeling,
}

impl KSelectionTrace {
    pub const METHOD: &'static str = "sequential one-sample TW1 test";
}

/// Smallest `K0` whose one-sample test is not rejected at level `alpha`.
///
/// The clustering seed for `K0` is derived from `seed` and `K0`, so the trace
/// for `K_max = m` is a prefix of the trace for any larger `K_max`.
pub fn select_num_communities(a: &AdjacencyMatrix, alpha: f64, k_max: usize, seed: u64) -> Result<KSelectionTrace> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if k_max == 0 || k_max > a.n() {
        return Err(Error::Config(format!("K_max = {k_max} must lie in 1..={}", a.n())));
    }
    let critical = tracy_widom::tw1_quantile(1.0 - alpha / 2.0)?;
    let embedding = if k_max > 1 { Some(SpectralEmbedding::new(a.to_mat().as_ref())?) } else { None };
    let mut tried = Vec::new();
    let mut last = None;
    for k0 in 1..=k_max {
        let g = match &embedding {
            Some(e) => cluster_embedding(e, k0, seed::derive(seed, k0 as u64))?,
            None => CommunityLabeling::single(a.n()),
        };
        let statistic = one_sample_statistic(a, &g)?;
        let rejected = statistic >= critical;
        tried.push(KSelectionStep { k0, statistic, critical, rejected });
        if !rejected {
            return Ok(KSelectionTrace { tried, selected: k0, exhausted: false, labeling: g });
        }
        last = Some(g);
    }
    Ok(KSelectionTrace {
        tried,
        selected: k_max,
        exhausted: true,
        labeling: last.expect("k_max >= 1"),
    })
}

/// Smallest sup-norm distance between two distinct rows of `B`.
pub fn min_row_separation(b: &BlockProbabilityMatrix) -> Result<f64> {
    let k = b.dim();
    if k < 2 {
        return Err(Error::UndefinedSeparation);
    }
    let mut best = f64::INFINITY;
    for u in 0..k {
        for v in u + 1..k {
            let d = b.row(u).iter().zip(b.row(v)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            best = best.min(d);
        }
    }
    Ok(best)
}
