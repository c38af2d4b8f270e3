//! From raw citation counts to a rank-based asymmetric dissimilarity matrix.
//!
//! Counts are first normalised into relatedness factors
//! `R(i→j) = H(i→j)·10⁶ / (Pap_j · Ref_i)`, which are then replaced by their
//! ranks over the whole matrix (largest relatedness gets rank 1, ties share
//! the average rank). Cells without citations have no relatedness and receive
//! the sentinel `max_rank + 1`.

use std::collections::HashSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Directed citation counts between `n` objects plus the size normalisers.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationTable {
    labels: Vec<String>,
    /// Entry `(i, j)` counts citations from `i` to `j`.
    cites: DMatrix<u64>,
    /// Papers published by each object (cited side).
    papers: Vec<u64>,
    /// References made by each object (citing side).
    refs: Vec<u64>,
}

impl CitationTable {
    pub fn new(labels: Vec<String>, cites: DMatrix<u64>, papers: Vec<u64>, refs: Vec<u64>) -> Result<Self> {
        let n = labels.len();
        if cites.nrows() != n || cites.ncols() != n {
            return Err(Error::Dimension(format!(
                "citation matrix is {}x{} but there are {n} labels",
                cites.nrows(),
                cites.ncols()
            )));
        }
        if papers.len() != n || refs.len() != n {
            return Err(Error::Dimension(format!(
                "expected {n} paper and reference counts, got {} and {}",
                papers.len(),
                refs.len()
            )));
        }
        check_unique(&labels)?;
        if let Some(index) = papers.iter().position(|&p| p == 0) {
            return Err(Error::ZeroCount {
                kind: "papers",
                index,
            });
        }
        if let Some(index) = refs.iter().position(|&r| r == 0) {
            return Err(Error::ZeroCount { kind: "refs", index });
        }
        Ok(Self {
            labels,
            cites,
            papers,
            refs,
        })
    }

    /// Build from row-major nested vectors, as found in the JSON schema.
    pub fn from_rows(
        labels: Vec<String>,
        cites: &[Vec<u64>],
        papers: Vec<u64>,
        refs: Vec<u64>,
    ) -> Result<Self> {
        let n = labels.len();
        if cites.len() != n || cites.iter().any(|row| row.len() != n) {
            return Err(Error::Dimension(format!(
                "citation rows must form a {n}x{n} matrix"
            )));
        }
        let m = DMatrix::from_fn(n, n, |i, j| cites[i][j]);
        Self::new(labels, m, papers, refs)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn cites(&self) -> &DMatrix<u64> {
        &self.cites
    }

    pub fn papers(&self) -> &[u64] {
        &self.papers
    }

    pub fn refs(&self) -> &[u64] {
        &self.refs
    }
}

/// Relatedness factors; `None` marks a cell with zero citations.
#[derive(Debug, Clone, PartialEq)]
pub struct RelatednessMatrix {
    values: DMatrix<Option<f64>>,
    labels: Vec<String>,
}

impl RelatednessMatrix {
    pub fn new(labels: Vec<String>, values: DMatrix<Option<f64>>) -> Result<Self> {
        let n = labels.len();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::Dimension(format!("relatedness matrix must be {n}x{n}")));
        }
        for v in values.iter().flatten() {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "defined relatedness values must be positive and finite, got {v}"
                )));
            }
        }
        check_unique(&labels)?;
        Ok(Self { values, labels })
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[(i, j)]
    }

    pub fn values(&self) -> &DMatrix<Option<f64>> {
        &self.values
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn defined_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }
}

/// Square matrix of directed dissimilarities `δ(i, j)` from `i` to `j`.
///
/// Neither symmetry nor a zero diagonal is assumed. `max_rank` is the
/// largest value carried by a defined cell; undefined cells hold
/// `max_rank + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissimilarity {
    delta: DMatrix<f64>,
    max_rank: f64,
    labels: Vec<String>,
}

impl Dissimilarity {
    /// Wrap a matrix whose largest value is taken as `max_rank`.
    pub fn new(labels: Vec<String>, delta: DMatrix<f64>) -> Result<Self> {
        let max = delta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::with_max_rank(labels, delta, max)
    }

    pub fn with_max_rank(labels: Vec<String>, delta: DMatrix<f64>, max_rank: f64) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidInput("dissimilarity matrix is empty".into()));
        }
        if delta.nrows() != n || delta.ncols() != n {
            return Err(Error::Dimension(format!(
                "dissimilarity matrix is {}x{} but there are {n} labels",
                delta.nrows(),
                delta.ncols()
            )));
        }
        if let Some(((i, j), v)) = delta
            .iter()
            .enumerate()
            .map(|(k, v)| ((k % n, k / n), v))
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidInput(format!(
                "entry ({i}, {j}) = {v} is not a finite nonnegative number"
            )));
        }
        if !(max_rank.is_finite() && max_rank >= 0.0) {
            return Err(Error::InvalidInput(format!("invalid max rank {max_rank}")));
        }
        check_unique(&labels)?;
        Ok(Self {
            delta,
            max_rank,
            labels,
        })
    }

    /// Convenience constructor from row-major nested rows with generated labels.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows must form a square matrix".into()));
        }
        let labels = (1..=n).map(|i| i.to_string()).collect();
        Self::new(labels, DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn delta(&self) -> &DMatrix<f64> {
        &self.delta
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.delta[(i, j)]
    }

    pub fn max_rank(&self) -> f64 {
        self.max_rank
    }

    /// Value held by undefined cells.
    pub fn sentinel(&self) -> f64 {
        self.max_rank + 1.0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `δᵀ`, swapping the roles of source and target.
    pub fn transposed(&self) -> Self {
        Self {
            delta: self.delta.transpose(),
            max_rank: self.max_rank,
            labels: self.labels.clone(),
        }
    }

    /// Cells holding the sentinel, in row-major order.
    pub fn undefined_cells(&self) -> Vec<(usize, usize)> {
        let s = self.sentinel();
        let n = self.len();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.delta[(i, j)] == s)
            .collect()
    }
}

/// Relatedness of every ordered pair; the diagonal is treated like any other cell.
///
/// Numerator and denominator are exact integers in `f64`, so the single
/// division is correctly rounded and equal ratios give bitwise-equal values.
/// This keeps tie detection in [`rank_transform`] exact.
pub fn compute_relatedness(counts: &CitationTable) -> Result<RelatednessMatrix> {
    let n = counts.len();
    let values = DMatrix::from_fn(n, n, |i, j| {
        let h = counts.cites[(i, j)];
        (h > 0).then(|| relatedness(h, counts.papers[j], counts.refs[i]))
    });
    RelatednessMatrix::new(counts.labels.clone(), values)
}

pub(crate) fn relatedness(h: u64, papers_cited: u64, refs_citing: u64) -> f64 {
    (h as f64 * 1e6) / (papers_cited as f64 * refs_citing as f64)
}

/// Replace defined relatedness values by their joint descending ranks.
pub fn rank_transform(rel: &RelatednessMatrix) -> Result<Dissimilarity> {
    let n = rel.len();
    let mut defined: Vec<(usize, f64)> = rel
        .values
        .iter()
        .enumerate()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect();
    if defined.is_empty() {
        return Err(Error::NoDefinedEntries);
    }
    defined.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut ranks = vec![0.0; defined.len()];
    let mut start = 0;
    while start < defined.len() {
        let mut end = start + 1;
        while end < defined.len() && defined[end].1 == defined[start].1 {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        ranks[start..end].fill(avg);
        start = end;
    }
    let max_rank = ranks.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut delta = DMatrix::from_element(n, n, max_rank + 1.0);
    for ((k, _), r) in defined.iter().zip(&ranks) {
        // column-major storage index
        delta[(k % n, k / n)] = *r;
    }
    Dissimilarity::with_max_rank(rel.labels.clone(), delta, max_rank)
}

/// `(max_rank + 1) − δ`; undefined cells map to zero.
pub fn to_similarity(delta: &Dissimilarity) -> DMatrix<f64> {
    let s = delta.sentinel();
    delta.delta.map(|d| s - d)
}

/// Summary of a rank transform, written next to the dissimilarity file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankProvenance {
    pub n: usize,
    pub max_rank: f64,
    pub sentinel: f64,
    pub defined_cells: usize,
    pub undefined_count: usize,
    /// Number of groups of two or more tied relatedness values.
    pub tie_groups: usize,
    /// Cells belonging to a tie group.
    pub tied_cells: usize,
    pub undefined_cells: Vec<[usize; 2]>,
}

impl RankProvenance {
    pub fn new(rel: &RelatednessMatrix, delta: &Dissimilarity) -> Self {
        let mut vals: Vec<f64> = rel.values.iter().flatten().copied().collect();
        vals.sort_by(|a, b| a.total_cmp(b));
        let mut tie_groups = 0;
        let mut tied_cells = 0;
        let mut i = 0;
        while i < vals.len() {
            let mut j = i + 1;
            while j < vals.len() && vals[j] == vals[i] {
                j += 1;
            }
            if j - i > 1 {
                tie_groups += 1;
                tied_cells += j - i;
            }
            i = j;
        }
        let n = rel.len();
        let undefined_cells: Vec<[usize; 2]> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| rel.get(i, j).is_none())
            .map(|(i, j)| [i, j])
            .collect();
        Self {
            n,
            max_rank: delta.max_rank(),
            sentinel: delta.sentinel(),
            defined_cells: vals.len(),
            undefined_count: undefined_cells.len(),
            tie_groups,
            tied_cells,
            undefined_cells,
        }
    }
}

pub(crate) fn check_unique(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}
