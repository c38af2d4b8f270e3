//! Dense SVD helpers on top of faer.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Thin SVD: singular values (descending), `U` (`rows × r`) and `V`
/// (`cols × r`) with `r = min(rows, cols)`.
pub(crate) fn thin_svd(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>, DMatrix<f64>)> {
    let (rows, cols) = a.shape();
    let mat = faer::Mat::<f64>::from_fn(rows, cols, |i, j| a[(i, j)]);
    let svd = mat
        .thin_svd()
        .map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let r = rows.min(cols);
    let (s, u, v) = (svd.S(), svd.U(), svd.V());
    let singular = (0..r).map(|k| s[k]).collect();
    let um = DMatrix::from_fn(rows, r, |i, k| u[(i, k)]);
    let vm = DMatrix::from_fn(cols, r, |i, k| v[(i, k)]);
    Ok((singular, um, vm))
}

/// Minimum-norm least-squares solution of `A x ≈ b`, dropping singular
/// values below `rcond · σ₁`.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rcond: f64) -> Option<DVector<f64>> {
    if a.ncols() == 0 {
        return Some(DVector::zeros(0));
    }
    let (s, u, v) = thin_svd(a).ok()?;
    let cut = rcond * s.first().copied().unwrap_or(0.0);
    let utb = u.tr_mul(b);
    let mut x = DVector::zeros(a.ncols());
    for (k, &sk) in s.iter().enumerate() {
        if sk > cut && sk > 0.0 {
            x += v.column(k) * (utb[k] / sk);
        }
    }
    Some(x)
}
