//! Known-`X` orthogonal Procrustes baseline.
//!
//! `argmin_Q ‖Y - QX‖_F` over orthogonal `Q` is the orthogonal polar factor
//! of `YX^T`, computed here by Newton's iteration `Q ← (Q + Q^{-T})/2`
//! with Frobenius-norm scaling. All matrices are dense and row-major.

use ndarray::{Array2, ArrayView2};

use crate::error::{check_dim, Error, Result};
use crate::numeric::{frobenius_distance, frobenius_norm};

/// Newton stops once `‖Q_k - Q_{k-1}‖_F` falls to this.
pub const POLAR_TOL: f64 = 1e-10;
pub const POLAR_MAX_ITER: usize = 100;

/// Pivots below this fraction of the largest entry are treated as zero.
const PIVOT_RTOL: f64 = 1e-11;

/// Scaling is dropped once the iteration is this close to converged.
const SCALING_CUTOFF: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct PolarResult {
    pub orthogonal_factor: Array2<f64>,
    pub iterations: usize,
    /// `‖Q_k - Q_{k-1}‖_F` at termination.
    pub residual: f64,
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
///
/// Fails with `SingularInput` when a pivot drops below `1e-11 · max|A_ij|`.
pub fn invert(a: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    check_dim(n, a.ncols())?;
    let scale = a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::SingularInput("matrix is zero or non-finite".into()));
    }
    let tol = PIVOT_RTOL * scale;
    let mut lhs = a.to_owned();
    let mut inv = Array2::<f64>::eye(n);

    for col in 0..n {
        let (pivot_row, pivot_abs) = (col..n)
            .map(|r| (r, lhs[(r, col)].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= tol {
            return Err(Error::SingularInput(format!(
                "pivot {pivot_abs:e} at column {col} of {n} is below {tol:e}"
            )));
        }
        if pivot_row != col {
            for j in 0..n {
                lhs.swap((col, j), (pivot_row, j));
                inv.swap((col, j), (pivot_row, j));
            }
        }
        let pivot = lhs[(col, col)];
        lhs.row_mut(col).mapv_inplace(|x| x / pivot);
        inv.row_mut(col).mapv_inplace(|x| x / pivot);
        let lhs_pivot_row = lhs.row(col).to_owned();
        let inv_pivot_row = inv.row(col).to_owned();
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = lhs[(r, col)];
            if factor != 0.0 {
                lhs.row_mut(r).scaled_add(-factor, &lhs_pivot_row);
                inv.row_mut(r).scaled_add(-factor, &inv_pivot_row);
            }
        }
    }
    Ok(inv)
}

/// Orthogonal polar factor of a square nonsingular `A`.
pub fn polar_orthogonal_factor(a: ArrayView2<'_, f64>) -> Result<PolarResult> {
    let n = a.nrows();
    check_dim(n, a.ncols())?;
    let norm = frobenius_norm(a);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::SingularInput("matrix is zero or non-finite".into()));
    }
    let mut q = a.mapv(|x| x / norm);
    let mut residual = f64::INFINITY;
    for iter in 1..=POLAR_MAX_ITER {
        let inv = invert(q.view())?;
        let gamma = if residual > SCALING_CUTOFF {
            (frobenius_norm(inv.view()) / frobenius_norm(q.view())).sqrt()
        } else {
            1.0
        };
        let next = (&q * gamma + &inv.t() / gamma) * 0.5;
        residual = frobenius_distance(&next, &q);
        q = next;
        if !residual.is_finite() {
            break;
        }
        if residual <= POLAR_TOL {
            return Ok(PolarResult {
                orthogonal_factor: q,
                iterations: iter,
                residual,
            });
        }
    }
    Err(Error::SingularInput(format!(
        "polar iteration did not converge in {POLAR_MAX_ITER} steps (residual {residual:e})"
    )))
}

/// Best orthogonal `Q` for `Y ≈ QX` with `X` known: the polar factor of `YX^T`.
pub fn procrustes_known_x(y: ArrayView2<'_, f64>, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    check_dim(y.nrows(), x.nrows())?;
    check_dim(y.ncols(), x.ncols())?;
    let cross = y.dot(&x.t());
    Ok(polar_orthogonal_factor(cross.view())?.orthogonal_factor)
}
