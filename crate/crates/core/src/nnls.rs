//! Lawson–Hanson active-set solver for `min ‖Ax − b‖  s.t.  x ≥ 0`.

use nalgebra::{DMatrix, DVector};

use crate::linalg::lstsq;

/// Solve the nonnegative least squares problem. Returns `x` and the
/// residual norm `‖Ax − b‖`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m, "right-hand side length must match the row count");
    let mut x = DVector::zeros(n);
    if n == 0 {
        return (x, b.norm());
    }

    let norm1 = a.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
    let tol = 10.0 * f64::EPSILON * norm1 * m.max(n) as f64;
    let mut passive = vec![false; n];
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let w = a.tr_mul(&(b - a * &x));
        let candidate = (0..n)
            .filter(|&j| !passive[j] && w[j] > tol)
            .fold(None, |best: Option<usize>, j| match best {
                Some(k) if w[k] >= w[j] => Some(k),
                _ => Some(j),
            });
        let Some(j) = candidate else { break };
        passive[j] = true;

        // inner loop: keep the passive-set solution feasible
        loop {
            let z = solve_passive(a, b, &passive);
            let infeasible = (0..n).any(|i| passive[i] && z[i] <= tol);
            if !infeasible {
                x = z;
                break;
            }
            let mut step = 1.0f64;
            for i in 0..n {
                if passive[i] && z[i] <= tol {
                    let denom = x[i] - z[i];
                    if denom > 0.0 {
                        step = step.min(x[i] / denom);
                    }
                }
            }
            x += (z - &x) * step;
            for i in 0..n {
                if passive[i] && x[i] <= tol {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    let res = (a * &x - b).norm();
    (x, res)
}

fn solve_passive(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[bool]) -> DVector<f64> {
    let idx: Vec<usize> = (0..passive.len()).filter(|&i| passive[i]).collect();
    let sub = a.select_columns(&idx);
    let sol = lstsq(&sub, b, 1e-13).unwrap_or_else(|| DVector::zeros(idx.len()));
    let mut z = DVector::zeros(passive.len());
    for (k, &i) in idx.iter().enumerate() {
        z[i] = sol[k];
    }
    z
}
