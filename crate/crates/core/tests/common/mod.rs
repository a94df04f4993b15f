//! Dense reference implementations used as test oracles. Nothing here calls
//! into the library's structured operators.
#![allow(dead_code)]

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn matmul(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
    let (n, k) = a.dim();
    assert_eq!(k, b.nrows());
    let p = b.ncols();
    let mut out = Array2::zeros((n, p));
    for i in 0..n {
        for j in 0..p {
            let mut acc = 0.0;
            for l in 0..k {
                acc += a[[i, l]] * b[[l, j]];
            }
            out[[i, j]] = acc;
        }
    }
    out
}

/// `I - 2 v v^T / (v^T v)`.
pub fn dense_reflector(v: ArrayView1<'_, f64>) -> Array2<f64> {
    let n = v.len();
    let nn: f64 = v.iter().map(|x| x * x).sum();
    Array2::from_shape_fn((n, n), |(i, j)| {
        let delta = if i == j { 1.0 } else { 0.0 };
        delta - 2.0 * v[i] * v[j] / nn
    })
}

pub fn dense_product(vs: &[Array1<f64>], n: usize) -> Array2<f64> {
    let mut out = Array2::eye(n);
    for v in vs {
        out = matmul(out.view(), dense_reflector(v.view()).view());
    }
    out
}

pub fn max_abs_diff(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn frob(a: ArrayView2<'_, f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, n: usize) -> Array1<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn gaussian_mat<R: Rng>(rng: &mut R, n: usize, p: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, p), || StandardNormal.sample(rng))
}

pub fn unit_positive<R: Rng>(rng: &mut R, n: usize) -> Array1<f64> {
    let v: Array1<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let norm = v.dot(&v).sqrt();
    v / norm
}

/// Random orthogonal matrix by modified Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> Array2<f64> {
    let mut q = gaussian_mat(rng, n, n);
    for j in 0..n {
        for k in 0..j {
            let d: f64 = (0..n).map(|i| q[[i, j]] * q[[i, k]]).sum();
            for i in 0..n {
                q[[i, j]] -= d * q[[i, k]];
            }
        }
        let norm: f64 = (0..n).map(|i| q[[i, j]] * q[[i, j]]).sum::<f64>().sqrt();
        for i in 0..n {
            q[[i, j]] /= norm;
        }
    }
    q
}

/// Expected data matrix for a single reflector `u` preceded by an orthogonal
/// `Q` whose row sums are `s`: every column equals `θμ(s - 2u(u^T s))`.
pub fn mean_valued_y(u: ArrayView1<'_, f64>, s: ArrayView1<'_, f64>, theta: f64, mu: f64, p: usize) -> Array2<f64> {
    let us = u.dot(&s);
    let col: Array1<f64> = (0..u.len()).map(|i| theta * mu * (s[i] - 2.0 * u[i] * us)).collect();
    Array2::from_shape_fn((u.len(), p), |(i, _)| col[i])
}

pub fn linf_up_to_sign(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    let plus = a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let minus = a.iter().zip(b.iter()).map(|(x, y)| (x + y).abs()).fold(0.0, f64::max);
    plus.min(minus)
}

/// One-sided Jacobi SVD of a square matrix: returns `(U, sigma, W)` with
/// `A = U diag(sigma) W^T`.
pub fn jacobi_svd(a: ArrayView2<'_, f64>) -> (Array2<f64>, Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut b = a.to_owned();
    let mut w = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let mut rotated = false;
        for j in 0..n {
            for k in j + 1..n {
                let alpha: f64 = (0..n).map(|i| b[[i, j]] * b[[i, j]]).sum();
                let beta: f64 = (0..n).map(|i| b[[i, k]] * b[[i, k]]).sum();
                let gamma: f64 = (0..n).map(|i| b[[i, j]] * b[[i, k]]).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut b, &mut w] {
                    for i in 0..n {
                        let x = m[[i, j]];
                        let y = m[[i, k]];
                        m[[i, j]] = c * x - s * y;
                        m[[i, k]] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Array1<f64> = (0..n)
        .map(|j| (0..n).map(|i| b[[i, j]] * b[[i, j]]).sum::<f64>().sqrt())
        .collect();
    let u = Array2::from_shape_fn((n, n), |(i, j)| b[[i, j]] / sigma[j]);
    (u, sigma, w)
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
