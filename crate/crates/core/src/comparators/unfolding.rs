//! Metric unfolding of a rectangular dissimilarity matrix by stress majorization.
//!
//! Two point sets are placed in the plane so that the distance between
//! individual `i` (row) and object `j` (column) approximates `δ(i, j)`.
//! Raw stress `Σᵢⱼ (δᵢⱼ − ‖x1ᵢ − x2ⱼ‖)²` is minimised by alternating Guttman
//! steps: with the objects held fixed every individual moves to
//! `(1/n₂) Σⱼ [x2ⱼ + δᵢⱼ (x1ᵢ − x2ⱼ)/dᵢⱼ]`, and symmetrically for objects.
//! Each half step minimises a majorizing function, so stress never increases.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::Dissimilarity;

const DIM: usize = 2;

/// Which side of `Δ` plays the individuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleOrder {
    /// Rows of `Δ` (sources, e.g. citing journals) are individuals.
    RowsAsIndividuals,
    /// `Δ` is transposed first, so columns (targets) are individuals.
    ColumnsAsIndividuals,
}

impl RoleOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            RoleOrder::RowsAsIndividuals => "rows_as_individuals",
            RoleOrder::ColumnsAsIndividuals => "columns_as_individuals",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnfoldingOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop when the relative stress decrease of one iteration falls below this.
    pub rel_tol: f64,
}

impl Default for UnfoldingOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            seed: 0,
            max_iter: 5000,
            rel_tol: 1e-8,
        }
    }
}

/// One restart: its stress after every iteration, starting from the
/// random configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnfoldingRun {
    pub trace: Vec<f64>,
    pub converged: bool,
}

impl UnfoldingRun {
    pub fn initial_stress(&self) -> f64 {
        self.trace[0]
    }

    pub fn final_stress(&self) -> f64 {
        *self.trace.last().expect("trace is never empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnfoldingSolution {
    /// Individuals, `n₁ × 2`.
    pub x1: DMatrix<f64>,
    /// Objects, `n₂ × 2`.
    pub x2: DMatrix<f64>,
    pub stress: f64,
    pub restarts_used: usize,
    pub converged: bool,
    pub role_order: RoleOrder,
    pub best_restart: usize,
    pub runs: Vec<UnfoldingRun>,
    pub labels: Vec<String>,
}

/// `Σᵢⱼ (δᵢⱼ − ‖x1ᵢ − x2ⱼ‖)²`.
pub fn raw_stress(delta: &DMatrix<f64>, x1: &DMatrix<f64>, x2: &DMatrix<f64>) -> f64 {
    let mut s = 0.0;
    for i in 0..delta.nrows() {
        for j in 0..delta.ncols() {
            let d = (x1.row(i) - x2.row(j)).norm();
            s += (delta[(i, j)] - d).powi(2);
        }
    }
    s
}

pub fn unfolding_fit(
    delta: &Dissimilarity,
    role: RoleOrder,
    opts: UnfoldingOptions,
) -> Result<UnfoldingSolution> {
    let n = delta.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "unfolding needs at least 3 objects, got {n}"
        )));
    }
    if opts.restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    let m = match role {
        RoleOrder::RowsAsIndividuals => delta.delta().clone(),
        RoleOrder::ColumnsAsIndividuals => delta.delta().transpose(),
    };
    let (x1, x2, runs, best) = unfold_matrix(&m, opts)?;
    let stress = runs[best].final_stress();
    Ok(UnfoldingSolution {
        x1,
        x2,
        stress,
        restarts_used: runs.len(),
        converged: runs[best].converged,
        role_order: role,
        best_restart: best,
        runs,
        labels: delta.labels().to_vec(),
    })
}

type Unfolded = (DMatrix<f64>, DMatrix<f64>, Vec<UnfoldingRun>, usize);

/// Multistart unfolding of an arbitrary `n₁ × n₂` matrix.
pub fn unfold_matrix(delta: &DMatrix<f64>, opts: UnfoldingOptions) -> Result<Unfolded> {
    if delta.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("dissimilarities must be finite".into()));
    }
    let (n1, n2) = delta.shape();
    let mean = delta.mean().abs().max(1e-3);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut best: Option<(DMatrix<f64>, DMatrix<f64>, usize)> = None;
    let mut runs = Vec::with_capacity(opts.restarts);
    for r in 0..opts.restarts {
        let mut x1 = DMatrix::from_fn(n1, DIM, |_, _| rng.random_range(-mean..mean));
        let mut x2 = DMatrix::from_fn(n2, DIM, |_, _| rng.random_range(-mean..mean));
        let run = majorize(delta, &mut x1, &mut x2, opts.max_iter, opts.rel_tol);
        let better = match &best {
            None => true,
            Some((_, _, b)) => run.final_stress() < runs_final(&runs, *b),
        };
        runs.push(run);
        if better {
            best = Some((x1, x2, r));
        }
    }
    let (x1, x2, b) = best.expect("restarts >= 1");
    Ok((x1, x2, runs, b))
}

fn runs_final(runs: &[UnfoldingRun], i: usize) -> f64 {
    runs[i].final_stress()
}

fn majorize(
    delta: &DMatrix<f64>,
    x1: &mut DMatrix<f64>,
    x2: &mut DMatrix<f64>,
    max_iter: usize,
    rel_tol: f64,
) -> UnfoldingRun {
    let mut stress = raw_stress(delta, x1, x2);
    let mut trace = vec![stress];
    let mut converged = stress == 0.0;
    let mut iter = 0;
    while !converged && iter < max_iter {
        guttman_half_step(delta, x1, x2);
        guttman_half_step(&delta.transpose(), x2, x1);
        let next = raw_stress(delta, x1, x2);
        trace.push(next);
        converged = next == 0.0 || (stress - next) <= rel_tol * stress;
        stress = next;
        iter += 1;
    }
    UnfoldingRun { trace, converged }
}

/// Move every row of `movers` to the minimiser of the majorizer built at its
/// current position, holding `fixed` in place.
fn guttman_half_step(delta: &DMatrix<f64>, movers: &mut DMatrix<f64>, fixed: &DMatrix<f64>) {
    let nf = fixed.nrows() as f64;
    for i in 0..movers.nrows() {
        let mut acc = [0.0; DIM];
        for j in 0..fixed.nrows() {
            let diff = movers.row(i) - fixed.row(j);
            let d = diff.norm();
            for s in 0..DIM {
                acc[s] += fixed[(j, s)];
                if d > 0.0 {
                    acc[s] += delta[(i, j)] * diff[s] / d;
                }
            }
        }
        for s in 0..DIM {
            movers[(i, s)] = acc[s] / nf;
        }
    }
}
