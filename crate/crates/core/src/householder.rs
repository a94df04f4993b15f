//! Householder reflectors `H = I - 2uu^T` and ordered products of them.
//!
//! Reflectors are kept as their unit vector only. Applying one to a vector
//! costs `O(n)`, to an `n x p` block `O(np)`, and a product of `m` of them
//! `O(nmp)`. Dense matrices are only produced by [`HouseholderFactor::to_dense`]
//! and [`OrthogonalProduct::to_dense`].

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ArrayViewMut1, ArrayViewMut2, Axis, Zip};

use crate::error::{check_dim, Error, Result};

/// Allowed deviation of `‖u‖₂` from one after construction.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A Householder reflector stored by its unit normal vector.
#[derive(Debug, Clone, PartialEq)]
pub struct HouseholderFactor {
    u: Array1<f64>,
}

impl HouseholderFactor {
    /// Builds the reflector whose normal is `v / ‖v‖₂`.
    pub fn new(v: ArrayView1<'_, f64>) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::DimensionTooSmall(v.len()));
        }
        let norm = v.dot(&v).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let mut u = v.mapv(|x| x / norm);
        // one more pass removes the rounding left by the first division
        let norm = u.dot(&u).sqrt();
        if (norm - 1.0).abs() > UNIT_NORM_TOL / 4.0 {
            u.mapv_inplace(|x| x / norm);
        }
        Ok(Self { u })
    }

    pub fn from_vec(v: Vec<f64>) -> Result<Self> {
        Self::new(Array1::from(v).view())
    }

    /// Reflector about the `i`-th coordinate axis.
    pub fn basis(n: usize, i: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        check_dim(n, n.max(i + 1))?;
        let mut u = Array1::zeros(n);
        u[i] = 1.0;
        Ok(Self { u })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn u(&self) -> ArrayView1<'_, f64> {
        self.u.view()
    }

    pub fn into_inner(self) -> Array1<f64> {
        self.u
    }

    /// The reflector with normal `-u`; it is the same linear map.
    pub fn negated(&self) -> Self {
        Self { u: -&self.u }
    }

    /// `x - 2u(u^T x)`.
    pub fn apply(&self, x: ArrayView1<'_, f64>) -> Result<Array1<f64>> {
        let mut out = x.to_owned();
        self.apply_in_place(out.view_mut())?;
        Ok(out)
    }

    pub fn apply_in_place(&self, mut x: ArrayViewMut1<'_, f64>) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        let w = 2.0 * self.u.dot(&x);
        x.scaled_add(-w, &self.u);
        Ok(())
    }

    /// `Y - 2u(u^T Y)` for an `n x p` block.
    pub fn apply_matrix(&self, y: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = y.to_owned();
        self.apply_matrix_in_place(out.view_mut())?;
        Ok(out)
    }

    pub fn apply_matrix_in_place(&self, mut y: ArrayViewMut2<'_, f64>) -> Result<()> {
        check_dim(self.dim(), y.nrows())?;
        // w = 2 Y^T u accumulated row by row (contiguous for row-major Y),
        // then Y -= u w^T
        let mut w = Array1::zeros(y.ncols());
        for (row, &ui) in y.axis_iter(Axis(0)).zip(self.u.iter()) {
            if ui != 0.0 {
                w.scaled_add(2.0 * ui, &row);
            }
        }
        for (mut row, &ui) in y.axis_iter_mut(Axis(0)).zip(self.u.iter()) {
            if ui != 0.0 {
                row.scaled_add(-ui, &w);
            }
        }
        Ok(())
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.dim();
        let mut h = Array2::eye(n);
        Zip::indexed(&mut h).for_each(|(i, j), h_ij| *h_ij -= 2.0 * self.u[i] * self.u[j]);
        h
    }
}

/// One slot of an [`OrthogonalProduct`].
///
/// A reflector can never equal the identity, so an uninitialised slot is
/// carried as an explicit `Identity`.
#[derive(Debug, Clone, PartialEq)]
pub enum Reflector {
    Identity,
    Factor(HouseholderFactor),
}

impl Reflector {
    pub fn factor(&self) -> Option<&HouseholderFactor> {
        match self {
            Reflector::Identity => None,
            Reflector::Factor(h) => Some(h),
        }
    }

    fn apply_matrix_in_place(&self, y: ArrayViewMut2<'_, f64>) -> Result<()> {
        match self {
            Reflector::Identity => Ok(()),
            Reflector::Factor(h) => h.apply_matrix_in_place(y),
        }
    }

    fn apply_in_place(&self, x: ArrayViewMut1<'_, f64>) -> Result<()> {
        match self {
            Reflector::Identity => Ok(()),
            Reflector::Factor(h) => h.apply_in_place(x),
        }
    }
}

impl From<HouseholderFactor> for Reflector {
    fn from(h: HouseholderFactor) -> Self {
        Reflector::Factor(h)
    }
}

/// `V = H_1 H_2 ... H_m`, an orthogonal `n x n` matrix kept in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalProduct {
    n: usize,
    factors: Vec<Reflector>,
}

impl OrthogonalProduct {
    /// The empty product (identity) on `R^n`.
    pub fn identity(n: usize) -> Self {
        Self { n, factors: Vec::new() }
    }

    /// `m` identity slots, the default starting point for sequential recovery.
    pub fn identity_slots(n: usize, m: usize) -> Self {
        Self {
            n,
            factors: vec![Reflector::Identity; m],
        }
    }

    pub fn from_factors(n: usize, factors: Vec<HouseholderFactor>) -> Result<Self> {
        Self::from_reflectors(n, factors.into_iter().map(Reflector::Factor).collect())
    }

    pub fn from_reflectors(n: usize, factors: Vec<Reflector>) -> Result<Self> {
        for f in factors.iter().filter_map(Reflector::factor) {
            check_dim(n, f.dim())?;
        }
        Ok(Self { n, factors })
    }

    pub fn push(&mut self, factor: impl Into<Reflector>) -> Result<()> {
        let factor = factor.into();
        if let Some(h) = factor.factor() {
            check_dim(self.n, h.dim())?;
        }
        self.factors.push(factor);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of slots `m`, identity slots included.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn reflectors(&self) -> &[Reflector] {
        &self.factors
    }

    /// `VY` when `transpose` is false, `V^T Y` otherwise.
    pub fn apply(&self, y: ArrayView2<'_, f64>, transpose: bool) -> Result<Array2<f64>> {
        let mut out = y.to_owned();
        self.apply_in_place(out.view_mut(), transpose)?;
        Ok(out)
    }

    pub fn apply_in_place(&self, mut y: ArrayViewMut2<'_, f64>, transpose: bool) -> Result<()> {
        check_dim(self.n, y.nrows())?;
        if transpose {
            for f in &self.factors {
                f.apply_matrix_in_place(y.view_mut())?;
            }
        } else {
            for f in self.factors.iter().rev() {
                f.apply_matrix_in_place(y.view_mut())?;
            }
        }
        Ok(())
    }

    pub fn apply_vec(&self, x: ArrayView1<'_, f64>, transpose: bool) -> Result<Array1<f64>> {
        check_dim(self.n, x.len())?;
        let mut out = x.to_owned();
        if transpose {
            for f in &self.factors {
                f.apply_in_place(out.view_mut())?;
            }
        } else {
            for f in self.factors.iter().rev() {
                f.apply_in_place(out.view_mut())?;
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut v = Array2::eye(self.n);
        self.apply_in_place(v.view_mut(), false)
            .expect("identity has matching dimension");
        v
    }
}

/// Given `u`, returns `(u1, u2, u3)` with `H(u) H(u1) = H(u2) H(u3)`.
///
/// `u1` is the coordinate axis with the smallest `|u_j|` made orthogonal to
/// `u`; then `u2 = (u + u1)/√2` and `u3 = (u - u1)/√2`.
pub fn alternate_factorization(
    u: &HouseholderFactor,
) -> Result<(HouseholderFactor, HouseholderFactor, HouseholderFactor)> {
    let u = u.u();
    let j = u
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(j, _)| j)
        .ok_or(Error::DimensionTooSmall(0))?;
    // e_j - u_j u
    let mut w = u.mapv(|x| -u[j] * x);
    w[j] += 1.0;
    let u1 = HouseholderFactor::new(w.view())?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let u2 = HouseholderFactor::new(((&u + &u1.u) * s).view())?;
    let u3 = HouseholderFactor::new(((&u - &u1.u) * s).view())?;
    Ok((u1, u2, u3))
}
