//! Seeded synthetic inputs for examples, tests and smoke runs.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::archetypoids::DataMatrix;
use crate::ingest::{CitationTable, Dissimilarity};

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// Citation counts between `n` journals scattered over a latent plane.
///
/// Each journal gets a position, a size and a citing propensity; counts
/// decay with latent distance, self-citation is boosted, and roughly one
/// cell in five is zero.
pub fn synthetic_citations(n: usize, seed: u64) -> CitationTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
        .collect();
    let papers: Vec<u64> = (0..n).map(|_| rng.random_range(30..300)).collect();
    let refs: Vec<u64> = papers.iter().map(|&p| p * rng.random_range(20..40)).collect();
    let propensity: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..1.5)).collect();
    let mut cites = DMatrix::<u64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d2 = (pos[i][0] - pos[j][0]).powi(2) + (pos[i][1] - pos[j][1]).powi(2);
            let mut rate = propensity[i] * papers[j] as f64 * 0.4 * (-d2 / 0.08).exp();
            if i == j {
                rate *= 3.0;
            }
            let noise: f64 = rng.random_range(0.5..1.5);
            let count = (rate * noise).floor() as u64;
            cites[(i, j)] = if rng.random_bool(0.15) { 0 } else { count };
        }
    }
    CitationTable::new(labels(n), cites, papers, refs).expect("generated counts are valid")
}

/// Entries drawn uniformly from `[1, 50)`.
pub fn random_dissimilarity(n: usize, seed: u64) -> Dissimilarity {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(1.0..50.0));
    Dissimilarity::new(labels(n), m).expect("finite positive entries")
}

/// Uniform points in `[0, 1)^m`.
pub fn random_points(n: usize, m: usize, seed: u64) -> DataMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(n, m, |_, _| rng.random_range(0.0..1.0));
    DataMatrix::new(labels(n), x).expect("finite entries")
}

/// Two planted planar configurations and the exact distances between them.
pub struct PlantedUnfolding {
    pub delta: Dissimilarity,
    pub x1: DMatrix<f64>,
    pub x2: DMatrix<f64>,
}

pub fn planted_unfolding(n: usize, seed: u64) -> PlantedUnfolding {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x1 = DMatrix::from_fn(n, 2, |_, _| rng.random_range(0.0..10.0));
    let x2 = DMatrix::from_fn(n, 2, |_, _| rng.random_range(0.0..10.0));
    let d = DMatrix::from_fn(n, n, |i, j| (x1.row(i) - x2.row(j)).norm());
    let delta = Dissimilarity::new(labels(n), d).expect("distances are finite");
    PlantedUnfolding { delta, x1, x2 }
}
