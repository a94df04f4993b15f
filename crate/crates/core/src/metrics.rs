//! Error measures. All reflector comparisons are sign-invariant.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{check_dim, Result};
use crate::householder::OrthogonalProduct;
use crate::numeric::{compensated_sum, frobenius_distance, frobenius_norm};
use crate::sparse::SparseMatrix;

/// Above this dimension `frobenius_error_v` never forms `n x n` matrices.
pub const DENSE_FROBENIUS_MAX_N: usize = 2000;

const PROBE_BLOCK: usize = 64;

/// Summary of one recovery, as reported per trial.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorReport {
    pub linf_u: Option<f64>,
    pub frob_v: f64,
    pub frob_x_per_entry: f64,
    pub support_f1: f64,
    pub snr_measured_db: Option<f64>,
}

/// `min(‖u - û‖∞, ‖u + û‖∞)`.
pub fn linf_error_up_to_sign(u: ArrayView1<'_, f64>, u_hat: ArrayView1<'_, f64>) -> Result<f64> {
    check_dim(u.len(), u_hat.len())?;
    let (mut minus, mut plus) = (0.0_f64, 0.0_f64);
    for (a, b) in u.iter().zip(u_hat.iter()) {
        minus = minus.max((a - b).abs());
        plus = plus.max((a + b).abs());
    }
    Ok(minus.min(plus))
}

/// Estimated dictionary, either factored or dense.
#[derive(Debug, Clone, Copy)]
pub enum DictionaryRef<'a> {
    Product(&'a OrthogonalProduct),
    Dense(&'a Array2<f64>),
}

impl<'a> From<&'a OrthogonalProduct> for DictionaryRef<'a> {
    fn from(v: &'a OrthogonalProduct) -> Self {
        DictionaryRef::Product(v)
    }
}

impl<'a> From<&'a Array2<f64>> for DictionaryRef<'a> {
    fn from(v: &'a Array2<f64>) -> Self {
        DictionaryRef::Dense(v)
    }
}

impl DictionaryRef<'_> {
    fn dim(&self) -> usize {
        match self {
            DictionaryRef::Product(v) => v.dim(),
            DictionaryRef::Dense(d) => d.nrows(),
        }
    }
}

/// `‖V - V̂‖_F`.
///
/// Dense for `n <= 2000`; above that a factored `V̂` goes through the
/// matrix-free identity `‖V - V̂‖² = 2n - 2 tr(V^T V̂)`.
pub fn frobenius_error_v<'a>(v: &OrthogonalProduct, v_hat: impl Into<DictionaryRef<'a>>) -> Result<f64> {
    let v_hat = v_hat.into();
    check_dim(v.dim(), v_hat.dim())?;
    match v_hat {
        DictionaryRef::Product(vh) if v.dim() > DENSE_FROBENIUS_MAX_N => frobenius_error_v_matrix_free(v, vh),
        DictionaryRef::Product(vh) => Ok(frobenius_distance(&v.to_dense(), &vh.to_dense())),
        DictionaryRef::Dense(d) => {
            check_dim(v.dim(), d.ncols())?;
            Ok(frobenius_distance(&v.to_dense(), d))
        }
    }
}

/// Matrix-free path: probes `V^T V̂` with blocks of basis columns.
pub fn frobenius_error_v_matrix_free(v: &OrthogonalProduct, v_hat: &OrthogonalProduct) -> Result<f64> {
    let n = v.dim();
    check_dim(n, v_hat.dim())?;
    let mut diag = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let width = PROBE_BLOCK.min(n - start);
        let mut block = Array2::zeros((n, width));
        for k in 0..width {
            block[(start + k, k)] = 1.0;
        }
        let projected = v.apply(v_hat.apply(block.view(), false)?.view(), true)?;
        for k in 0..width {
            diag.push(projected[(start + k, k)]);
        }
        start += width;
    }
    let trace = compensated_sum(diag);
    Ok((2.0 * n as f64 - 2.0 * trace).max(0.0).sqrt())
}

/// `‖X - X̂‖_F / √(np)`.
pub fn x_error_per_entry(x: &SparseMatrix, x_hat: &SparseMatrix) -> Result<f64> {
    let (n, p) = x.shape();
    check_dim(n, x_hat.shape().0)?;
    check_dim(p, x_hat.shape().1)?;
    Ok(frobenius_distance(&x.to_dense(), &x_hat.to_dense()) / ((n * p) as f64).sqrt())
}

/// F1 score of the recovered support against the true one.
///
/// Two empty supports score 1.
pub fn support_f1(x: &SparseMatrix, x_hat: &SparseMatrix) -> Result<f64> {
    check_dim(x.shape().0, x_hat.shape().0)?;
    check_dim(x.shape().1, x_hat.shape().1)?;
    let truth = x.to_dense();
    let est = x_hat.to_dense();
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (a, b) in truth.iter().zip(est.iter()) {
        match (*a != 0.0, *b != 0.0) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fneg += 1,
            (false, false) => {}
        }
    }
    if tp + fp + fneg == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * tp as f64 / (2 * tp + fp + fneg) as f64)
}

/// `10 log10(‖signal‖² / ‖noise‖²)`; `+inf` for zero noise.
pub fn measured_snr_db(signal: ArrayView2<'_, f64>, noise: ArrayView2<'_, f64>) -> Result<f64> {
    check_dim(signal.nrows(), noise.nrows())?;
    check_dim(signal.ncols(), noise.ncols())?;
    let ps = frobenius_norm(signal).powi(2);
    let pn = frobenius_norm(noise).powi(2);
    if pn == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (ps / pn).log10())
}
