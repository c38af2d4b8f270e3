//! PAM k-medoids with average silhouette, used to judge cluster structure.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::archetypoids::DataMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedoidClustering {
    pub k: usize,
    pub medoids: Vec<usize>,
    /// Position in `medoids` of each point's cluster.
    pub assignment: Vec<usize>,
    pub silhouettes: Vec<f64>,
    pub average_silhouette: f64,
    /// Some silhouette had `max(a, b) = 0` and was set to zero.
    pub degenerate: bool,
}

pub fn euclidean_distances(x: &DataMatrix) -> DMatrix<f64> {
    let m = x.matrix();
    let n = m.nrows();
    DMatrix::from_fn(n, n, |i, j| (m.row(i) - m.row(j)).norm())
}

fn total_cost(dist: &DMatrix<f64>, medoids: &[usize]) -> f64 {
    (0..dist.nrows())
        .map(|i| {
            medoids
                .iter()
                .map(|&m| dist[(i, m)])
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// BUILD then steepest-descent SWAP on a precomputed distance matrix.
pub fn pam(dist: &DMatrix<f64>, k: usize) -> Result<Vec<usize>> {
    let n = dist.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidSelection(format!("k = {k} must lie in 1..={n}")));
    }
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    while medoids.len() < k {
        let mut best: Option<(usize, f64)> = None;
        let candidates: Vec<usize> = (0..n).filter(|c| !medoids.contains(c)).collect();
        for c in candidates {
            medoids.push(c);
            let cost = total_cost(dist, &medoids);
            medoids.pop();
            if best.is_none_or(|(_, b)| cost < b) {
                best = Some((c, cost));
            }
        }
        medoids.push(best.expect("candidates remain").0);
    }

    let mut cost = total_cost(dist, &medoids);
    for _ in 0..100 {
        let mut best: Option<(usize, usize, f64)> = None;
        for pos in 0..k {
            let keep = medoids[pos];
            let candidates: Vec<usize> = (0..n).filter(|c| !medoids.contains(c)).collect();
            for c in candidates {
                medoids[pos] = c;
                let t = total_cost(dist, &medoids);
                if best.is_none_or(|(_, _, b)| t < b) {
                    best = Some((pos, c, t));
                }
            }
            medoids[pos] = keep;
        }
        match best {
            Some((pos, c, t)) if cost - t > 1e-12 * cost.max(1.0) => {
                medoids[pos] = c;
                cost = t;
            }
            _ => break,
        }
    }
    Ok(medoids)
}

fn assign(dist: &DMatrix<f64>, medoids: &[usize]) -> Vec<usize> {
    (0..dist.nrows())
        .map(|i| {
            let mut best = 0;
            for (p, &m) in medoids.iter().enumerate() {
                if dist[(i, m)] < dist[(i, medoids[best])] {
                    best = p;
                }
            }
            best
        })
        .collect()
}

/// Per-point silhouettes; singletons score zero. Returns the flag for
/// `max(a, b) = 0`.
pub fn silhouettes(dist: &DMatrix<f64>, assignment: &[usize], k: usize) -> (Vec<f64>, bool) {
    let n = dist.nrows();
    let mut sizes = vec![0usize; k];
    for &c in assignment {
        sizes[c] += 1;
    }
    let mut degenerate = false;
    let s = (0..n)
        .map(|i| {
            let own = assignment[i];
            if sizes[own] <= 1 {
                return 0.0;
            }
            let mut sums = vec![0.0; k];
            for j in 0..n {
                if j != i {
                    sums[assignment[j]] += dist[(i, j)];
                }
            }
            let a = sums[own] / (sizes[own] - 1) as f64;
            let b = (0..k)
                .filter(|&c| c != own && sizes[c] > 0)
                .map(|c| sums[c] / sizes[c] as f64)
                .fold(f64::INFINITY, f64::min);
            if !b.is_finite() {
                return 0.0;
            }
            let denom = a.max(b);
            if denom == 0.0 {
                degenerate = true;
                0.0
            } else {
                (b - a) / denom
            }
        })
        .collect();
    (s, degenerate)
}

pub fn kmedoids(x: &DataMatrix, k: usize) -> Result<MedoidClustering> {
    let dist = euclidean_distances(x);
    cluster_with(&dist, k)
}

fn cluster_with(dist: &DMatrix<f64>, k: usize) -> Result<MedoidClustering> {
    let medoids = pam(dist, k)?;
    let assignment = assign(dist, &medoids);
    let (silhouettes, degenerate) = silhouettes(dist, &assignment, k);
    let average_silhouette = silhouettes.iter().sum::<f64>() / silhouettes.len() as f64;
    Ok(MedoidClustering {
        k,
        medoids,
        assignment,
        silhouettes,
        average_silhouette,
        degenerate,
    })
}

/// Cluster for every `k` in the range, which must lie within `2..=n−1`.
pub fn kmedoids_silhouette(
    x: &DataMatrix,
    ks: impl IntoIterator<Item = usize>,
) -> Result<Vec<MedoidClustering>> {
    let n = x.n();
    let dist = euclidean_distances(x);
    ks.into_iter()
        .map(|k| {
            if k < 2 || k + 1 > n {
                return Err(Error::InvalidSelection(format!(
                    "silhouette needs 2 <= k <= n-1, got k = {k} with n = {n}"
                )));
            }
            cluster_with(&dist, k)
        })
        .collect()
}

/// The clustering with the highest average silhouette (earliest on ties).
pub fn best_by_silhouette(results: &[MedoidClustering]) -> Option<&MedoidClustering> {
    results
        .iter()
        .fold(None, |best: Option<&MedoidClustering>, c| match best {
            Some(b) if b.average_silhouette >= c.average_silhouette => Some(b),
            _ => Some(c),
        })
}
