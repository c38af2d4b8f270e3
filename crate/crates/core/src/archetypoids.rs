//! Archetypoid analysis.
//!
//! Selects `k` actual observations (archetypoids) `z₁..z_k` and mixture
//! weights `α` so that `Σᵢ ‖xᵢ − Σⱼ αᵢⱼ zⱼ‖²` is minimal, with every row of
//! `α` on the probability simplex. The selection is found by a greedy BUILD
//! followed by a steepest-descent SWAP; [`ada_exhaustive`] enumerates every
//! subset and serves as the reference.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hplot::HPlotEmbedding;
use crate::linalg::lstsq;
use crate::nnls::nnls;

/// Weight of the sum-to-one row appended to the least squares system.
pub const PENALTY: f64 = 200.0;

/// Default ceiling on the number of subsets [`ada_exhaustive`] may visit.
pub const DEFAULT_BUDGET: u128 = 1_000_000;

/// Observations in rows, variables in columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    x: DMatrix<f64>,
    labels: Vec<String>,
}

impl DataMatrix {
    pub fn new(labels: Vec<String>, x: DMatrix<f64>) -> Result<Self> {
        if labels.len() != x.nrows() {
            return Err(Error::Dimension(format!(
                "{} labels for {} observations",
                labels.len(),
                x.nrows()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("data matrix has non-finite entries".into()));
        }
        Ok(Self { x, labels })
    }

    /// Rows labelled `0..n`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension("rows differ in length".into()));
        }
        let x = DMatrix::from_fn(n, m, |i, j| rows[i][j]);
        Self::new((0..n).map(|i| i.to_string()).collect(), x)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn m(&self) -> usize {
        self.x.ncols()
    }

    fn row(&self, i: usize) -> DVector<f64> {
        self.x.row(i).transpose()
    }
}

/// Row `j` holds the planar to-profile of object `j` followed by its
/// from-profile: `(h_j, h_{n+j})`.
pub fn combine_profiles(emb: &HPlotEmbedding) -> Result<DataMatrix> {
    if emb.dim() != 2 {
        return Err(Error::InvalidInput(format!(
            "profile combination needs a planar embedding, got {} dimensions",
            emb.dim()
        )));
    }
    let n = emb.n();
    let c = emb.coords();
    let x = DMatrix::from_fn(
        n,
        4,
        |j, col| {
            if col < 2 {
                c[(j, col)]
            } else {
                c[(n + j, col - 2)]
            }
        },
    );
    DataMatrix::new(emb.labels().to_vec(), x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaModel {
    pub archetypoid_indices: Vec<usize>,
    /// `n × k`, row-stochastic.
    #[serde(with = "matrix_rows")]
    pub alpha: DMatrix<f64>,
    pub rss: f64,
    /// RSS after BUILD and after every applied swap.
    pub trace: Vec<f64>,
    /// SWAP stopped at the iteration cap while still improving.
    pub iteration_capped: bool,
}

impl AdaModel {
    pub fn k(&self) -> usize {
        self.archetypoid_indices.len()
    }

    /// Archetypoid indices in increasing order.
    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut v = self.archetypoid_indices.clone();
        v.sort_unstable();
        v
    }

    /// Weight of observation `i` on the archetypoid that is data row `arch`.
    pub fn weight(&self, i: usize, arch: usize) -> Option<f64> {
        let j = self.archetypoid_indices.iter().position(|&a| a == arch)?;
        Some(self.alpha[(i, j)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapOptions {
    pub max_iter: usize,
    /// A swap is applied only if it lowers RSS by more than this fraction.
    pub rel_tol: f64,
}

impl Default for SwapOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            rel_tol: 1e-10,
        }
    }
}

fn check_selection(n: usize, indices: &[usize]) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::InvalidSelection("k must be at least 1".into()));
    }
    for (pos, &i) in indices.iter().enumerate() {
        if i >= n {
            return Err(Error::InvalidSelection(format!(
                "index {i} is out of range for {n} observations"
            )));
        }
        if indices[..pos].contains(&i) {
            return Err(Error::InvalidSelection(format!("index {i} appears twice")));
        }
    }
    Ok(())
}

/// Mixture weights of every observation over the given archetypoids and the
/// resulting residual sum of squares.
pub fn solve_alpha(x: &DataMatrix, indices: &[usize]) -> Result<(DMatrix<f64>, f64)> {
    check_selection(x.n(), indices)?;
    Ok(solve_alpha_unchecked(x, indices))
}

fn solve_alpha_unchecked(x: &DataMatrix, indices: &[usize]) -> (DMatrix<f64>, f64) {
    let (n, m, k) = (x.n(), x.m(), indices.len());
    let z = x.x.select_rows(indices); // k × m

    // [Zᵀ; M·1ᵀ] shared by every observation
    let mut aug = DMatrix::zeros(m + 1, k);
    aug.view_mut((0, 0), (m, k)).copy_from(&z.transpose());
    aug.row_mut(m).fill(PENALTY);

    let mut alpha = DMatrix::zeros(n, k);
    let mut rss = 0.0;
    for i in 0..n {
        if let Some(j) = indices.iter().position(|&a| a == i) {
            alpha[(i, j)] = 1.0;
            continue;
        }
        let xi = x.row(i);
        let w = simplex_weights(&z, &aug, &xi);
        let fitted = z.tr_mul(&w);
        rss += (xi - fitted).norm_squared();
        alpha.set_row(i, &w.transpose());
    }
    (alpha, rss)
}

/// Weights on the simplex for one observation: the penalised NNLS picks the
/// support, then the equality-constrained fit on that support makes the sum
/// exactly one.
fn simplex_weights(z: &DMatrix<f64>, aug: &DMatrix<f64>, xi: &DVector<f64>) -> DVector<f64> {
    let (k, m) = z.shape();
    let mut rhs = DVector::zeros(m + 1);
    rhs.rows_mut(0, m).copy_from(xi);
    rhs[m] = PENALTY;
    let (raw, _) = nnls(aug, &rhs);

    let support: Vec<usize> = (0..k).filter(|&j| raw[j] > 0.0).collect();
    if let Some(w) = refit_on_support(z, xi, &support) {
        return w;
    }
    let s = raw.sum();
    if s > 0.0 {
        raw / s
    } else {
        // degenerate; fall back on the nearest archetypoid
        let nearest = (0..k)
            .min_by(|&a, &b| {
                let da = (z.row(a).transpose() - xi).norm_squared();
                let db = (z.row(b).transpose() - xi).norm_squared();
                da.total_cmp(&db)
            })
            .unwrap_or(0);
        let mut w = DVector::zeros(k);
        w[nearest] = 1.0;
        w
    }
}

fn refit_on_support(z: &DMatrix<f64>, xi: &DVector<f64>, support: &[usize]) -> Option<DVector<f64>> {
    let k = z.nrows();
    let mut w = DVector::zeros(k);
    match support {
        [] => return None,
        [only] => {
            w[*only] = 1.0;
            return Some(w);
        }
        _ => {}
    }
    // eliminate the last weight: x − z_last = Σ_{j<last} a_j (z_j − z_last)
    let last = *support.last()?;
    let zl = z.row(last).transpose();
    let rest = &support[..support.len() - 1];
    let a = DMatrix::from_fn(z.ncols(), rest.len(), |r, c| z[(rest[c], r)] - zl[r]);
    let b = xi - &zl;
    let sol = lstsq(&a, &b, 1e-12)?;
    if sol.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let tail = 1.0 - sol.sum();
    if sol.iter().any(|&v| v < -1e-12) || tail < -1e-12 {
        return None;
    }
    for (c, &j) in rest.iter().enumerate() {
        w[j] = sol[c].max(0.0);
    }
    w[last] = tail.max(0.0);
    let s = w.sum();
    Some(w / s)
}

fn rss_of(x: &DataMatrix, indices: &[usize]) -> f64 {
    solve_alpha_unchecked(x, indices).1
}

/// Greedy forward selection of `k` starting archetypoids.
pub fn ada_build(x: &DataMatrix, k: usize) -> Result<Vec<usize>> {
    let n = x.n();
    if k == 0 || k > n {
        return Err(Error::InvalidSelection(format!("k = {k} must lie in 1..={n}")));
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    while chosen.len() < k {
        let mut best: Option<(usize, f64)> = None;
        let candidates: Vec<usize> = (0..n).filter(|c| !chosen.contains(c)).collect();
        for c in candidates {
            chosen.push(c);
            let r = rss_of(x, &chosen);
            chosen.pop();
            if best.is_none_or(|(_, b)| r < b) {
                best = Some((c, r));
            }
        }
        let (c, _) = best.expect("at least one candidate remains while chosen.len() < n");
        chosen.push(c);
    }
    Ok(chosen)
}

/// Steepest-descent exchange of archetypoids with non-archetypoids.
pub fn ada_swap(x: &DataMatrix, start: &[usize], opts: SwapOptions) -> Result<AdaModel> {
    check_selection(x.n(), start)?;
    let n = x.n();
    let mut current = start.to_vec();
    let mut rss = rss_of(x, &current);
    let mut trace = vec![rss];
    let mut capped = false;

    for pass in 0.. {
        if pass == opts.max_iter {
            capped = true;
            break;
        }
        let mut best: Option<(usize, usize, f64)> = None;
        for pos in 0..current.len() {
            let keep = current[pos];
            let candidates: Vec<usize> = (0..n).filter(|c| !current.contains(c)).collect();
            for cand in candidates {
                current[pos] = cand;
                let r = rss_of(x, &current);
                if best.is_none_or(|(_, _, b)| r < b) {
                    best = Some((pos, cand, r));
                }
            }
            current[pos] = keep;
        }
        match best {
            Some((pos, cand, r)) if rss - r > opts.rel_tol * rss => {
                current[pos] = cand;
                rss = r;
                trace.push(r);
            }
            _ => break,
        }
    }

    let (alpha, rss) = solve_alpha_unchecked(x, &current);
    Ok(AdaModel {
        archetypoid_indices: current,
        alpha,
        rss,
        trace,
        iteration_capped: capped,
    })
}

/// BUILD followed by SWAP with default options.
pub fn ada_fit(x: &DataMatrix, k: usize) -> Result<AdaModel> {
    ada_fit_with(x, k, SwapOptions::default())
}

pub fn ada_fit_with(x: &DataMatrix, k: usize, opts: SwapOptions) -> Result<AdaModel> {
    let start = ada_build(x, k)?;
    ada_swap(x, &start, opts)
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Global optimum over every `k`-subset, within `budget` subsets.
pub fn ada_exhaustive(x: &DataMatrix, k: usize, budget: u128) -> Result<AdaModel> {
    let n = x.n();
    if k == 0 || k > n {
        return Err(Error::InvalidSelection(format!("k = {k} must lie in 1..={n}")));
    }
    let combinations = binomial(n, k);
    if combinations > budget {
        return Err(Error::BudgetExceeded { combinations, budget });
    }
    let mut subset: Vec<usize> = (0..k).collect();
    let mut best = (subset.clone(), f64::INFINITY);
    loop {
        let r = rss_of(x, &subset);
        if r < best.1 {
            best = (subset.clone(), r);
        }
        // next combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&i| subset[i] < n - k + i) else {
            break;
        };
        subset[pos] += 1;
        for i in pos + 1..k {
            subset[i] = subset[i - 1] + 1;
        }
    }
    let (alpha, rss) = solve_alpha_unchecked(x, &best.0);
    Ok(AdaModel {
        archetypoid_indices: best.0,
        alpha,
        rss,
        trace: vec![rss],
        iteration_capped: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreePoint {
    pub k: usize,
    pub rss: f64,
    /// Smallest RSS seen for any k' ≤ k.
    pub envelope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Screeplot {
    pub points: Vec<ScreePoint>,
    /// Advisory elbow: the interior k with the largest discrete curvature
    /// `rss(k−1) − 2·rss(k) + rss(k+1)`, i.e. the second forward difference
    /// taken from `k − 1`.
    pub elbow: Option<usize>,
}

impl Screeplot {
    pub fn from_models(models: &[AdaModel]) -> Result<Self> {
        let mut points: Vec<ScreePoint> = Vec::with_capacity(models.len());
        let mut env = f64::INFINITY;
        for m in models {
            if points.last().is_some_and(|p| p.k >= m.k()) {
                return Err(Error::InvalidInput("k values must be strictly increasing".into()));
            }
            env = env.min(m.rss);
            points.push(ScreePoint {
                k: m.k(),
                rss: m.rss,
                envelope: env,
            });
        }
        let mut elbow: Option<(usize, f64)> = None;
        for w in points.windows(3) {
            if w[1].k != w[0].k + 1 || w[2].k != w[1].k + 1 {
                continue;
            }
            let curvature = w[0].rss - 2.0 * w[1].rss + w[2].rss;
            if curvature > 0.0 && elbow.is_none_or(|(_, c)| curvature > c) {
                elbow = Some((w[1].k, curvature));
            }
        }
        Ok(Self {
            points,
            elbow: elbow.map(|(k, _)| k),
        })
    }
}

/// Fit every `k` in the range and collect the RSS curve.
pub fn screeplot(x: &DataMatrix, ks: impl IntoIterator<Item = usize>) -> Result<(Screeplot, Vec<AdaModel>)> {
    let models = ks
        .into_iter()
        .map(|k| ada_fit(x, k))
        .collect::<Result<Vec<_>>>()?;
    Ok((Screeplot::from_models(&models)?, models))
}

mod matrix_rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(serde::de::Error::custom("ragged alpha rows"));
        }
        Ok(DMatrix::from_fn(n, k, |i, j| rows[i][j]))
    }
}
