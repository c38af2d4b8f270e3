//! H-plot embedding of asymmetric dissimilarity profiles.
//!
//! The dissimilarity matrix is read as a data matrix with `2n` variables: the
//! `n` columns of `Δ` (how every object relates *to* object `j`) followed by
//! the `n` columns of `Δᵀ` (how `j` relates to every object). Each variable
//! is placed at the row of `Q Λ^{1/2}`, the scaled eigenvectors of the
//! covariance between variables, so that the Euclidean distance between two
//! points approximates the standard deviation of the difference between the
//! two variables. The approximation is exact when every dimension is kept.
//!
//! The map is not meant to preserve the rank order of individual
//! dissimilarities; it preserves relationships between whole profiles.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Dissimilarity;
use crate::linalg::thin_svd;

/// Relative threshold below which an eigenvalue counts as zero.
pub const EIGEN_CLAMP: f64 = 1e-12;

/// `D = [Δ | Δᵀ]`, an `n × 2n` data matrix of profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileMatrix {
    d: DMatrix<f64>,
    labels: Vec<String>,
}

impl ProfileMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of objects.
    pub fn n(&self) -> usize {
        self.d.nrows()
    }
}

pub fn build_profile_matrix(delta: &Dissimilarity) -> ProfileMatrix {
    let n = delta.len();
    let m = delta.delta();
    let d = DMatrix::from_fn(n, 2 * n, |i, c| if c < n { m[(i, c)] } else { m[(c - n, i)] });
    ProfileMatrix {
        d,
        labels: delta.labels().to_vec(),
    }
}

/// Whether a row of [`HPlotEmbedding::coords`] represents a to- or from-profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileRole {
    /// Column `j` of `Δ`: dissimilarities from all objects to `j` (cited profile).
    To,
    /// Row `j` of `Δ`: dissimilarities from `j` to all objects (citing profile).
    From,
}

impl ProfileRole {
    pub fn as_str(self) -> &'static str {
        match self {
            ProfileRole::To => "to",
            ProfileRole::From => "from",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HPlotEmbedding {
    /// `2n × p`; rows `0..n` are to-profiles, rows `n..2n` from-profiles.
    coords: DMatrix<f64>,
    /// Full covariance spectrum (length `2n`), nonincreasing.
    eigenvalues: Vec<f64>,
    gof: f64,
    labels: Vec<String>,
}

impl HPlotEmbedding {
    pub fn coords(&self) -> &DMatrix<f64> {
        &self.coords
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn gof(&self) -> f64 {
        self.gof
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of objects (half the number of embedded points).
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.coords.ncols()
    }

    pub fn point(&self, role: ProfileRole, j: usize) -> Vec<f64> {
        let r = match role {
            ProfileRole::To => j,
            ProfileRole::From => self.n() + j,
        };
        self.coords.row(r).iter().copied().collect()
    }
}

/// Embed the `2n` profile variables into `p` dimensions.
///
/// The covariance `S` is never formed: with `Dc` the column-centred profile
/// matrix and `Dc = U Σ Vᵀ`, the eigenpairs of `S = DcᵀDc/(n−1)` are
/// `λₖ = σₖ²/(n−1)` with eigenvectors the right singular vectors.
pub fn hplot_embed(profiles: &ProfileMatrix, p: usize) -> Result<HPlotEmbedding> {
    let n = profiles.n();
    if n < 2 {
        return Err(Error::InvalidInput("h-plot needs at least two objects".into()));
    }
    let available = (n - 1).min(2 * n);
    if p == 0 || p > available {
        return Err(Error::DimensionTooLarge {
            requested: p,
            available,
        });
    }

    let mut centred = profiles.d.clone();
    for mut col in centred.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }

    let (singular, _, v) = thin_svd(&centred)?;
    let scale = (n - 1) as f64;
    let mut eigenvalues: Vec<f64> = singular.iter().map(|s| s * s / scale).collect();
    eigenvalues.resize(2 * n, 0.0);
    clamp_spectrum(&mut eigenvalues);

    let mut coords = DMatrix::zeros(2 * n, p);
    for (k, lam) in eigenvalues.iter().take(p).enumerate() {
        let mut q: DVector<f64> = v.column(k).into_owned();
        fix_sign(&mut q);
        let root = lam.sqrt();
        coords.set_column(k, &(q * root));
    }
    // identical to/from columns (δⱼᵢ = δᵢⱼ for all i) embed at the same point
    let d = &profiles.d;
    for j in 0..n {
        if d.column(j) == d.column(n + j) {
            let row = coords.row(j).into_owned();
            coords.set_row(n + j, &row);
        }
    }

    let gof = goodness_of_fit(&eigenvalues, p)?;
    Ok(HPlotEmbedding {
        coords,
        eigenvalues,
        gof,
        labels: profiles.labels.clone(),
    })
}

/// Shorthand for profile construction followed by [`hplot_embed`].
pub fn embed(delta: &Dissimilarity, p: usize) -> Result<HPlotEmbedding> {
    hplot_embed(&build_profile_matrix(delta), p)
}

fn clamp_spectrum(eigenvalues: &mut [f64]) {
    let top = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    for v in eigenvalues.iter_mut() {
        if *v < EIGEN_CLAMP * top || *v < 0.0 {
            *v = 0.0;
        }
    }
}

/// Make the largest-magnitude component positive (first one on exact ties).
fn fix_sign(q: &mut DVector<f64>) {
    let mut best = 0;
    for (i, v) in q.iter().enumerate() {
        if v.abs() > q[best].abs() {
            best = i;
        }
    }
    if q[best] < 0.0 {
        q.neg_mut();
    }
}

/// Share of the squared spectrum captured by the first `p` eigenvalues.
pub fn goodness_of_fit(spectrum: &[f64], p: usize) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidInput("dimension must be at least 1".into()));
    }
    let total: f64 = spectrum.iter().map(|l| l * l).sum();
    if total <= 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    let kept: f64 = spectrum.iter().take(p).map(|l| l * l).sum();
    if spectrum.iter().skip(p).all(|&l| l == 0.0) {
        return Ok(1.0);
    }
    Ok(kept / total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryScore {
    pub index: usize,
    pub label: String,
    pub score: f64,
}

/// Distance between each object's to- and from-profile, largest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryReport {
    pub scores: Vec<AsymmetryScore>,
}

impl AsymmetryReport {
    pub fn most_asymmetric(&self, count: usize) -> Vec<usize> {
        self.scores.iter().take(count).map(|s| s.index).collect()
    }

    pub fn most_symmetric(&self, count: usize) -> Vec<usize> {
        self.scores.iter().rev().take(count).map(|s| s.index).collect()
    }
}

pub fn asymmetry_scores(emb: &HPlotEmbedding) -> AsymmetryReport {
    let n = emb.n();
    let mut scores: Vec<AsymmetryScore> = (0..n)
        .map(|j| {
            let d = emb.coords.row(j) - emb.coords.row(n + j);
            AsymmetryScore {
                index: j,
                label: emb.labels[j].clone(),
                score: d.norm(),
            }
        })
        .collect();
    scores.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
    AsymmetryReport { scores }
}

/// Sample standard deviation (divisor `n − 1`) of column `i` minus column `j`.
///
/// Equals the embedded distance between points `i` and `j` when every
/// positive dimension is kept.
pub fn profile_distance_check(profiles: &ProfileMatrix, i: usize, j: usize) -> f64 {
    let n = profiles.n();
    let diff = profiles.d.column(i) - profiles.d.column(j);
    let mean = diff.mean();
    let ss: f64 = diff.iter().map(|v| (v - mean).powi(2)).sum();
    (ss / (n - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn delta(rows: &[Vec<f64>]) -> Dissimilarity {
        Dissimilarity::from_rows(rows).unwrap()
    }

    #[test]
    fn profile_matrix_definition() {
        let p = build_profile_matrix(&delta(&[vec![0.0, 1.0], vec![2.0, 0.0]]));
        assert_eq!(
            p.matrix(),
            &DMatrix::from_row_slice(2, 4, &[0.0, 1.0, 0.0, 2.0, 2.0, 0.0, 1.0, 0.0])
        );
    }

    #[test]
    fn symmetric_input_has_identical_profile_columns() {
        let d = delta(&[vec![0.0, 3.0, 5.0], vec![3.0, 1.0, 2.0], vec![5.0, 2.0, 4.0]]);
        let p = build_profile_matrix(&d);
        for j in 0..3 {
            assert_eq!(p.matrix().column(j), p.matrix().column(3 + j));
        }
        let emb = hplot_embed(&p, 2).unwrap();
        for s in asymmetry_scores(&emb).scores {
            assert_eq!(s.score, 0.0);
        }
    }

    #[test]
    fn gof_examples() {
        assert_eq!(goodness_of_fit(&[4.0, 0.0, 0.0], 2).unwrap(), 1.0);
        assert_abs_diff_eq!(
            goodness_of_fit(&[2.0, 1.0, 1.0], 2).unwrap(),
            5.0 / 6.0,
            epsilon = 1e-15
        );
        assert!(matches!(
            goodness_of_fit(&[0.0, 0.0], 1),
            Err(Error::ZeroSpectrum)
        ));
    }

    #[test]
    fn rank_one_covariance_has_unit_gof() {
        // every column is an affine function of the same vector
        let base = [1.0, 4.0, 2.0, 7.0];
        let rows_sym: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| base[i] + base[j] + 10.0).collect())
            .collect();
        let emb = embed(&delta(&rows_sym), 2).unwrap();
        assert_abs_diff_eq!(emb.gof(), 1.0, epsilon = 1e-12);
        assert_eq!(emb.eigenvalues().iter().filter(|&&l| l > 0.0).count(), 1);
    }

    #[test]
    fn dimension_bounds() {
        let d = delta(&[vec![0.0, 1.0, 2.0], vec![2.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]]);
        assert!(matches!(
            embed(&d, 3),
            Err(Error::DimensionTooLarge {
                requested: 3,
                available: 2
            })
        ));
        assert!(embed(&d, 0).is_err());
        let single = delta(&[vec![1.0]]);
        assert!(embed(&single, 1).is_err());
    }

    #[test]
    fn constant_profile_embeds_at_origin() {
        // column 0 of Δ is constant, so the to-profile of object 0 has no variance
        let d = delta(&[vec![5.0, 1.0, 2.0], vec![5.0, 0.0, 4.0], vec![5.0, 3.0, 1.0]]);
        let emb = embed(&d, 2).unwrap();
        for k in 0..2 {
            assert_abs_diff_eq!(emb.coords()[(0, k)], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn matches_dense_eigensolver_on_explicit_covariance() {
        let d = delta(&[vec![0.0, 4.0, 1.0], vec![2.0, 3.0, 7.0], vec![6.0, 1.0, 2.0]]);
        let p = build_profile_matrix(&d);
        let emb = hplot_embed(&p, 2).unwrap();

        // explicit 6x6 sample covariance
        let x = p.matrix();
        let (n, m) = (x.nrows(), x.ncols());
        let means: Vec<f64> = (0..m).map(|c| x.column(c).mean()).collect();
        let s = DMatrix::from_fn(m, m, |a, b| {
            (0..n)
                .map(|r| (x[(r, a)] - means[a]) * (x[(r, b)] - means[b]))
                .sum::<f64>()
                / (n - 1) as f64
        });
        let eig = nalgebra::SymmetricEigen::new(s);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        for (k, &col) in order.iter().take(2).enumerate() {
            let lam = eig.eigenvalues[col];
            assert_abs_diff_eq!(emb.eigenvalues()[k], lam, epsilon = 1e-10);
            let q = eig.eigenvectors.column(col) * lam.sqrt();
            let c = emb.coords().column(k);
            let same = (&q - c).amax();
            let flipped = (&q + c).amax();
            assert!(same.min(flipped) < 1e-10, "column {k}: {same} / {flipped}");
        }
    }

    #[test]
    fn full_dimension_distances_are_exact() {
        let d = delta(&[
            vec![0.0, 4.0, 1.0, 9.0],
            vec![2.0, 3.0, 7.0, 1.0],
            vec![6.0, 1.0, 2.0, 3.0],
            vec![5.0, 8.0, 2.0, 2.0],
        ]);
        let p = build_profile_matrix(&d);
        let emb = hplot_embed(&p, 3).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let dist = (emb.coords().row(i) - emb.coords().row(j)).norm();
                assert_abs_diff_eq!(dist, profile_distance_check(&p, i, j), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn distance_check_ignores_constant_offsets() {
        let d = delta(&[vec![1.0, 3.0], vec![2.0, 4.0]]);
        let p = build_profile_matrix(&d);
        assert_eq!(profile_distance_check(&p, 0, 0), 0.0);
        // column 1 = column 0 + 2
        assert_abs_diff_eq!(profile_distance_check(&p, 0, 1), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn deterministic_coordinates() {
        let d = delta(&[vec![0.0, 4.0, 1.0], vec![2.0, 3.0, 7.0], vec![6.0, 1.0, 2.0]]);
        let a = embed(&d, 2).unwrap();
        let b = embed(&d, 2).unwrap();
        assert_eq!(a.coords().as_slice(), b.coords().as_slice());
    }
}
