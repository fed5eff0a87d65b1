//! Stochastic block model types and seeded sampling.

use faer::Mat;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed;

/// Assignment of each node to one of `K` communities.
///
/// Labels are stored 0-based (`0..K`); [`CommunityLabeling::one_based`] gives
/// the external 1-based form. Every community has at least one member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityLabeling {
    labels: Vec<usize>,
    num_communities: usize,
}

impl CommunityLabeling {
    pub fn new(labels: Vec<usize>, num_communities: usize) -> Result<Self> {
        if num_communities == 0 {
            return Err(Error::Config("number of communities must be positive".into()));
        }
        let mut seen = vec![false; num_communities];
        for (i, &l) in labels.iter().enumerate() {
            if l >= num_communities {
                return Err(Error::Config(format!(
                    "node {i} has label {} outside 1..={num_communities}",
                    l + 1
                )));
            }
            seen[l] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::Config(format!("community {} is empty", empty + 1)));
        }
        Ok(Self { labels, num_communities })
    }

    /// Build from 1-based labels; `K` is the largest label.
    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        if labels.iter().any(|&l| l == 0) {
            return Err(Error::Config("1-based labels must be positive".into()));
        }
        let k = labels.iter().copied().max().unwrap_or(0);
        Self::new(labels.iter().map(|&l| l - 1).collect(), k)
    }

    /// Everybody in one community.
    pub fn single(n: usize) -> Self {
        Self { labels: vec![0; n], num_communities: 1 }
    }

    /// `n` nodes split into `k` contiguous blocks whose sizes differ by at most one.
    pub fn balanced(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Config(format!("cannot split {n} nodes into {k} nonempty blocks")));
        }
        let labels = (0..n).map(|i| i * k / n).collect();
        Self::new(labels, k)
    }

    /// `k` contiguous blocks of exactly `size` nodes each.
    pub fn equal_blocks(size: usize, k: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Config("community size must be positive".into()));
        }
        Self::balanced(size * k, k)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_communities(&self) -> usize {
        self.num_communities
    }

    /// 0-based community of node `i`.
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l + 1).collect()
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_communities];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Labeling of the permuted node set: new node `i` is old node `perm[i]`.
    pub fn permute_nodes(&self, perm: &[usize]) -> Self {
        Self {
            labels: perm.iter().map(|&p| self.labels[p]).collect(),
            num_communities: self.num_communities,
        }
    }

    /// Rename communities: old community `u` becomes `relabel[u]`.
    pub fn relabel(&self, relabel: &[usize]) -> Result<Self> {
        Self::new(self.labels.iter().map(|&l| relabel[l]).collect(), self.num_communities)
    }
}

/// Symmetric `K x K` matrix of block connection probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockProbabilityMatrix {
    k: usize,
    entries: Vec<f64>,
}

impl BlockProbabilityMatrix {
    /// Row-major entries; must be symmetric with values in `[0, 1]`.
    pub fn new(k: usize, entries: Vec<f64>) -> Result<Self> {
        if k == 0 || entries.len() != k * k {
            return Err(Error::Config(format!(
                "block matrix of dimension {k} needs {} entries, got {}",
                k * k,
                entries.len()
            )));
        }
        for u in 0..k {
            for v in 0..k {
                let b = entries[u * k + v];
                if !(0.0..=1.0).contains(&b) {
                    return Err(Error::Config(format!("B[{u}][{v}] = {b} is not a probability")));
                }
                if b != entries[v * k + u] {
                    return Err(Error::Config(format!("B is not symmetric at ({u}, {v})")));
                }
            }
        }
        Ok(Self { k, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Config("block matrix rows must all have length K".into()));
        }
        Self::new(k, rows.concat())
    }

    /// `f(u, v)` is evaluated for `u <= v` and mirrored.
    pub fn from_fn(k: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let mut entries = vec![0.0; k * k];
        for u in 0..k {
            for v in u..k {
                let b = f(u, v);
                entries[u * k + v] = b;
                entries[v * k + u] = b;
            }
        }
        Self::new(k, entries)
    }

    /// `within` on the diagonal, `between` elsewhere.
    pub fn planted(k: usize, within: f64, between: f64) -> Result<Self> {
        Self::from_fn(k, |u, v| if u == v { within } else { between })
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.entries[u * self.k + v]
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.entries[u * self.k..(u + 1) * self.k]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.k).map(|u| self.row(u).to_vec()).collect()
    }

    /// Rename communities: old `u` becomes `relabel[u]`.
    pub fn relabel(&self, relabel: &[usize]) -> Self {
        let k = self.k;
        let mut entries = vec![0.0; k * k];
        for u in 0..k {
            for v in 0..k {
                entries[relabel[u] * k + relabel[v]] = self.get(u, v);
            }
        }
        Self { k, entries }
    }
}

/// Symmetric 0/1 adjacency matrix with an empty diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdjacencyMatrix {
    n: usize,
    entries: Vec<u8>,
}

impl AdjacencyMatrix {
    pub fn empty(n: usize) -> Self {
        Self { n, entries: vec![0; n * n] }
    }

    /// Build from unordered node pairs. Duplicates are harmless; self-loops are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut a = Self::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Config(format!("edge ({i}, {j}) out of range for {n} nodes")));
            }
            if i == j {
                return Err(Error::Config(format!("self-loop at node {i}")));
            }
            a.set(i, j);
        }
        Ok(a)
    }

    /// Build from the strict upper triangle given as a predicate.
    pub fn from_upper(n: usize, edge: impl Fn(usize, usize) -> bool) -> Self {
        let mut a = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if edge(i, j) {
                    a.set(i, j);
                }
            }
        }
        a
    }

    fn set(&mut self, i: usize, j: usize) {
        self.entries[i * self.n + j] = 1;
        self.entries[j * self.n + i] = 1;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.n + j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.get(i, j) == 1
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Edges as `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.entries.iter().map(|&e| e as usize).sum::<usize>() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|&e| e as usize).sum()
    }

    pub fn to_mat(&self) -> Mat<f64> {
        Mat::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }

    /// Matrix of the permuted graph: new node `i` is old node `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let n = self.n;
        let mut entries = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Self { n, entries }
    }
}

/// `P[i][j] = B[g(i)][g(j)]`, diagonal included.
pub fn edge_probability_matrix(g: &CommunityLabeling, b: &BlockProbabilityMatrix) -> Result<Mat<f64>> {
    if g.num_communities() != b.dim() {
        return Err(Error::Config(format!(
            "labeling has {} communities but B is {}x{}",
            g.num_communities(),
            b.dim(),
            b.dim()
        )));
    }
    let n = g.len();
    Ok(Mat::from_fn(n, n, |i, j| b.get(g.label(i), g.label(j))))
}

/// Draw an adjacency matrix with independent `Bernoulli(P[i][j])` upper-triangle entries.
///
/// Row `i` draws its entries `j > i` from its own stream, so the result does
/// not depend on how rows are scheduled across threads.
pub fn sample_from_probabilities(p: &Mat<f64>, seed: u64) -> Result<AdjacencyMatrix> {
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::Config("probability matrix must be square".into()));
    }
    let rows: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::stream_rng(seed, i as u64);
            (i + 1..n)
                .filter(|&j| rng.random::<f64>() < p[(i, j)])
                .collect()
        })
        .collect();
    let mut a = AdjacencyMatrix::empty(n);
    for (i, nbrs) in rows.into_iter().enumerate() {
        for j in nbrs {
            a.set(i, j);
        }
    }
    Ok(a)
}

/// Sample one network from the SBM `(g, B)`.
pub fn sample_sbm(g: &CommunityLabeling, b: &BlockProbabilityMatrix, seed: u64) -> Result<AdjacencyMatrix> {
    let p = edge_probability_matrix(g, b)?;
    sample_from_probabilities(&p, seed)
}
