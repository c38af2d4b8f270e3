//! Thresholded directed citation network and a Fruchterman–Reingold layout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Dissimilarity;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    /// Similarity `(max_rank + 1) − δ`.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationGraph {
    pub labels: Vec<String>,
    pub edges: Vec<Edge>,
    pub threshold: f64,
    /// Positions in the unit square, once a layout has been computed.
    pub layout: Option<Vec<[f64; 2]>>,
}

/// Keep the directed edge `i → j` whenever `δ(i, j) ≤ threshold`.
///
/// Low ranks mean strong relatedness, so smaller thresholds give sparser
/// graphs. Self-loops are kept; every object stays in the node set.
pub fn build_network(delta: &Dissimilarity, threshold: f64) -> Result<CitationGraph> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    let n = delta.len();
    let s = delta.sentinel();
    let edges = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| delta.get(i, j) <= threshold)
        .map(|(i, j)| Edge {
            source: i,
            target: j,
            weight: s - delta.get(i, j),
        })
        .collect();
    Ok(CitationGraph {
        labels: delta.labels().to_vec(),
        edges,
        threshold,
        layout: None,
    })
}

impl CitationGraph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Distinct unordered pairs joined by at least one non-loop edge.
    pub fn undirected_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|e| e.source != e.target)
            .map(|e| (e.source.min(e.target), e.source.max(e.target)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// Weakly connected components ignoring self-loops, each sorted, ordered
    /// by their smallest member.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let n = self.node_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (a, b) in self.undirected_pairs() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        groups.into_values().collect()
    }

    /// Nodes outside the largest weakly connected component (the earliest
    /// one on ties), sorted. Without any non-loop edge every node counts.
    pub fn isolated_nodes(&self) -> Vec<usize> {
        let comps = self.weak_components();
        if comps.iter().all(|c| c.len() < 2) {
            return (0..self.node_count()).collect();
        }
        let main = comps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(&a.0)))
            .map(|(i, _)| i);
        let mut out: Vec<usize> = comps
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != main)
            .flat_map(|(_, c)| c.iter().copied())
            .collect();
        out.sort_unstable();
        out
    }

    pub fn with_layout(mut self, seed: u64) -> Result<Self> {
        self.layout = Some(spring_layout(&self, seed, LayoutOptions::default())?);
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutOptions {
    pub iterations: usize,
    /// Starting step length, as a fraction of the frame width.
    pub initial_temperature: f64,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        Self {
            iterations: 500,
            initial_temperature: 0.1,
        }
    }
}

/// Fruchterman–Reingold layout inside the unit square.
///
/// Edges are treated as undirected and unweighted; the ideal edge length is
/// `sqrt(1/n)` and the temperature cools linearly to zero.
pub fn spring_layout(graph: &CitationGraph, seed: u64, opts: LayoutOptions) -> Result<Vec<[f64; 2]>> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::InvalidInput("graph has no nodes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
        .collect();
    let k = (1.0 / n as f64).sqrt();
    let pairs = graph.undirected_pairs();

    for it in 0..opts.iterations {
        let temp = opts.initial_temperature * (1.0 - it as f64 / opts.iterations as f64);
        let mut disp = vec![[0.0f64; 2]; n];
        for u in 0..n {
            for v in u + 1..n {
                let (dir, d) = direction(&pos[u], &pos[v], u, v);
                let f = k * k / d;
                for s in 0..2 {
                    disp[u][s] += dir[s] * f;
                    disp[v][s] -= dir[s] * f;
                }
            }
        }
        for &(u, v) in &pairs {
            let (dir, d) = direction(&pos[u], &pos[v], u, v);
            let f = d * d / k;
            for s in 0..2 {
                disp[u][s] -= dir[s] * f;
                disp[v][s] += dir[s] * f;
            }
        }
        for (p, dv) in pos.iter_mut().zip(&disp) {
            let len = (dv[0] * dv[0] + dv[1] * dv[1]).sqrt();
            if len > 0.0 {
                let step = len.min(temp) / len;
                for s in 0..2 {
                    p[s] = (p[s] + dv[s] * step).clamp(0.0, 1.0);
                }
            }
        }
    }
    Ok(pos)
}

/// Unit vector from `b` to `a` and the distance; coincident points get a
/// fixed direction derived from their indices.
fn direction(a: &[f64; 2], b: &[f64; 2], ia: usize, ib: usize) -> ([f64; 2], f64) {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let d = (dx * dx + dy * dy).sqrt();
    if d > 1e-9 {
        ([dx / d, dy / d], d)
    } else {
        let angle = (ia * 31 + ib * 17) as f64;
        ([angle.cos(), angle.sin()], 1e-9)
    }
}
