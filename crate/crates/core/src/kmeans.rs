//! Lloyd's k-means with k-means++ seeding and best-of-restarts selection.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seed::{self, label};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self { restarts: 20, max_iter: 100 }
    }
}

#[derive(Debug, Clone)]
pub struct Clustering {
    /// Cluster of each point, numbered by order of first appearance.
    pub assignment: Vec<usize>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.iter().enumerate() {
        let d = dist2(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut impl Rng) -> Option<Vec<Vec<f64>>> {
    let n = points.len();
    let mut centers = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            return None;
        }
        let mut target = rng.random::<f64>() * total;
        let mut pick = n - 1;
        for (i, &d) in d2.iter().enumerate() {
            if d > 0.0 && target < d {
                pick = i;
                break;
            }
            target -= d;
        }
        if d2[pick] <= 0.0 {
            pick = d2.iter().rposition(|&d| d > 0.0)?;
        }
        centers.push(points[pick].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(dist2(p, &centers[centers.len() - 1]));
        }
    }
    Some(centers)
}

fn lloyd(points: &[Vec<f64>], k: usize, max_iter: usize, rng: &mut impl Rng) -> Option<Clustering> {
    let dim = points[0].len();
    let mut centers = plus_plus_init(points, k, rng)?;
    let mut assignment = vec![usize::MAX; points.len()];
    for _ in 0..max_iter {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let (c, _) = nearest(p, &centers);
            if assignment[i] != c {
                assignment[i] = c;
                changed = true;
            }
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
        // Empty cluster: move its center onto the point worst served by its own
        // cluster, taken from a cluster that can spare a member.
        while let Some(empty) = counts.iter().position(|&c| c == 0) {
            let donor = points
                .iter()
                .enumerate()
                .filter(|&(i, _)| counts[assignment[i]] > 1)
                .map(|(i, p)| (i, dist2(p, &centers[assignment[i]])))
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))?;
            counts[assignment[donor.0]] -= 1;
            counts[empty] = 1;
            assignment[donor.0] = empty;
            centers[empty] = points[donor.0].clone();
            changed = true;
        }
        if !changed {
            break;
        }
    }
    let mut counts = vec![0usize; k];
    let mut inertia = 0.0;
    for (i, p) in points.iter().enumerate() {
        let (c, d) = nearest(p, &centers);
        assignment[i] = c;
        counts[c] += 1;
        inertia += d;
    }
    if counts.contains(&0) {
        return None;
    }
    Some(Clustering { assignment: canonical(&assignment, k), inertia })
}

fn canonical(assignment: &[usize], k: usize) -> Vec<usize> {
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    assignment
        .iter()
        .map(|&c| {
            if map[c] == usize::MAX {
                map[c] = next;
                next += 1;
            }
            map[c]
        })
        .collect()
}

/// Cluster `points` into exactly `k` nonempty groups.
///
/// Restarts run in parallel, each on its own seed stream; the lowest inertia
/// wins and ties go to the lowest restart index.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, config: KMeansConfig) -> Result<Clustering> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::Config(format!("cannot form {k} clusters from {n} points")));
    }
    if config.restarts == 0 {
        return Err(Error::Config("k-means needs at least one restart".into()));
    }
    let runs: Vec<Option<Clustering>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed::stream_rng(seed::derive_path(seed, &[label::RESTART, r as u64]), 0);
            lloyd(points, k, config.max_iter, &mut rng)
        })
        .collect();
    runs.into_iter()
        .flatten()
        .reduce(|best, c| if c.inertia < best.inertia { c } else { best })
        .ok_or(Error::ClusteringFailure { k, restarts: config.restarts })
}
