//! Closed-form moment estimators for Householder dictionaries.
//!
//! For `Y = HX` with Bernoulli(θ) support and support mean μ, every entry
//! satisfies `E[Y_ij] = θμ(1 - 2 u_i c)` where `c = Σ u_i`. The row means of
//! `Y` therefore determine `u` up to sign in `O(np)`:
//!
//! * [`estimate_u_hx`] solves for `c` from the grand mean, then `u_i` from
//!   each row mean.
//! * [`estimate_u_hx_alt`] uses `k_i = u_i c` and `Σ k_i = c²` instead.
//! * [`estimate_u_hqx`] handles `Y = HQX` for a known orthogonal `Q`; only
//!   the row sums `s = Q1` enter, through `k_i = u_i (u^T s)`.
//! * [`recover_v_sequential`] peels off `V = H_1 ... H_m` one reflector at a
//!   time.
//!
//! Every estimate is renormalised to a unit vector before use.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::error::{check_dim, Error, Result};
use crate::householder::{HouseholderFactor, OrthogonalProduct, Reflector};
use crate::numeric::{compensated_sum, row_sums};
use crate::sparse::SparseMatrix;

/// Default hard threshold for sparse-code recovery.
pub const DEFAULT_ZETA: f64 = 0.5;

/// Estimates with `ĉ` or `√|Σ k_m s_m|` at or below this are rejected.
pub const EPSILON_C: f64 = 1e-8;

/// Known sparse-model moments: support probability θ and support mean μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub theta: f64,
    pub mu: f64,
}

impl Moments {
    pub fn new(theta: f64, mu: f64) -> Result<Self> {
        if !(theta * mu > 0.0) || !(theta * mu).is_finite() {
            return Err(Error::InvalidModel(format!(
                "theta * mu must be positive and finite, got {theta} * {mu}"
            )));
        }
        Ok(Self { theta, mu })
    }

    fn scale(&self, p: usize) -> f64 {
        p as f64 * self.theta * self.mu
    }
}

impl From<&crate::synthesis::SparseModel> for Moments {
    fn from(m: &crate::synthesis::SparseModel) -> Self {
        Self {
            theta: m.theta(),
            mu: m.mu(),
        }
    }
}

/// First-order statistics of `Y` used by all estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    /// `ĉ = √max(0, (n - S/(pθμ))/2)`.
    pub c_hat: f64,
    /// True when the radicand of `ĉ²` came out negative and was clamped.
    pub c_clamped: bool,
    /// `k_i = (1 - Σ_j Y_ij/(pθμ))/2`.
    pub k: Array1<f64>,
    /// `Σ_j Y_ij / p`.
    pub y_row_means: Array1<f64>,
}

impl MomentEstimate {
    pub fn new(y: ArrayView2<'_, f64>, moments: Moments) -> Result<Self> {
        let (n, p) = y.dim();
        if p == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let sums = row_sums(y);
        let scale = moments.scale(p);
        let radicand = (n as f64 - compensated_sum(sums.iter().copied()) / scale) / 2.0;
        let k = sums.mapv(|s| (1.0 - s / scale) / 2.0);
        Ok(Self {
            c_hat: radicand.max(0.0).sqrt(),
            c_clamped: radicand < 0.0,
            k,
            y_row_means: sums / p as f64,
        })
    }
}

/// `ĉ` together with whether it was clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CEstimate {
    pub value: f64,
    pub clamped: bool,
}

pub fn estimate_c(y: ArrayView2<'_, f64>, moments: Moments) -> Result<CEstimate> {
    let m = MomentEstimate::new(y, moments)?;
    Ok(CEstimate {
        value: m.c_hat,
        clamped: m.c_clamped,
    })
}

/// Side information reported with every recovered reflector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics {
    pub c_hat: Option<f64>,
    pub c_clamped: bool,
    /// `Σ k_m s_m` after the global sign fix.
    pub weighted_sum: Option<f64>,
    /// Whether `k` was negated to make `Σ k_m s_m` positive.
    pub sign_flipped: bool,
    /// `‖û‖₂` of the closed-form estimate before renormalisation.
    pub raw_norm: f64,
    pub zeta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub u_hat: HouseholderFactor,
    pub x_hat: Option<SparseMatrix>,
    pub diagnostics: Diagnostics,
}

fn unit_from_raw(raw: Array1<f64>) -> Result<(HouseholderFactor, f64)> {
    let raw_norm = raw.dot(&raw).sqrt();
    let h = HouseholderFactor::new(raw.view()).map_err(|e| match e {
        Error::ZeroVector => Error::ill_conditioned("estimated Householder vector vanished"),
        other => other,
    })?;
    Ok((h, raw_norm))
}

/// Single-reflector recovery through `ĉ`, then `û_i = (1 - Σ_j Y_ij/(pθμ))/(2ĉ)`.
///
/// Sparse codes are recovered with threshold `zeta` when given.
pub fn estimate_u_hx(y: ArrayView2<'_, f64>, moments: Moments, zeta: Option<f64>) -> Result<RecoveryResult> {
    let m = MomentEstimate::new(y, moments)?;
    if m.c_hat <= EPSILON_C {
        return Err(Error::ill_conditioned(format!(
            "c too small ({:e}): the reflector needs sum(u) of order n^alpha with alpha > 1/4",
            m.c_hat
        )));
    }
    // ŷ_i / 2ĉ with ŷ_i = 1 - Σ_j Y_ij/(pθμ) = 2 k_i
    let raw = &m.k / m.c_hat;
    let (u_hat, raw_norm) = unit_from_raw(raw)?;
    let x_hat = zeta
        .map(|z| recover_x_single(y, &u_hat, z))
        .transpose()?;
    Ok(RecoveryResult {
        u_hat,
        x_hat,
        diagnostics: Diagnostics {
            c_hat: Some(m.c_hat),
            c_clamped: m.c_clamped,
            weighted_sum: None,
            sign_flipped: false,
            raw_norm,
            zeta,
        },
    })
}

/// Single-reflector recovery through `k_i = u_i c`, `û_i = k_i / √(Σ k_m)`.
pub fn estimate_u_hx_alt(y: ArrayView2<'_, f64>, moments: Moments, zeta: Option<f64>) -> Result<RecoveryResult> {
    let ones = Array1::ones(y.nrows());
    let mut r = estimate_u_hqx(y, ones.view(), moments, None, None)?;
    r.x_hat = zeta.map(|z| recover_x_single(y, &r.u_hat, z)).transpose()?;
    r.diagnostics.zeta = zeta;
    Ok(r)
}

/// Recovery of `H` from `Y = HQX` given `s = Q1`.
///
/// `k_i = (s_i - Σ_j Y_ij/(pθμ))/2` and `û_i = k_i/√(Σ k_m s_m)`. If the
/// weighted sum is negative, `k` is negated first (u and -u give the same
/// reflector). Codes `HT_ζ((HQ)^T Y)` are only produced when both `q` and
/// `zeta` are supplied.
pub fn estimate_u_hqx(
    y: ArrayView2<'_, f64>,
    s: ArrayView1<'_, f64>,
    moments: Moments,
    q: Option<&OrthogonalProduct>,
    zeta: Option<f64>,
) -> Result<RecoveryResult> {
    let (n, p) = y.dim();
    check_dim(n, s.len())?;
    if p == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    if let Some(q) = q {
        check_dim(n, q.dim())?;
    }
    let scale = moments.scale(p);
    let sums = row_sums(y);
    let mut k: Array1<f64> = s
        .iter()
        .zip(sums.iter())
        .map(|(si, yi)| (si - yi / scale) / 2.0)
        .collect();
    let mut weighted = compensated_sum(k.iter().zip(s.iter()).map(|(a, b)| a * b));
    let sign_flipped = weighted < 0.0;
    if sign_flipped {
        k.mapv_inplace(|x| -x);
        weighted = -weighted;
    }
    if weighted.sqrt() <= EPSILON_C {
        return Err(Error::ill_conditioned(format!(
            "sum_m k_m s_m = {weighted:e} is numerically zero (u^T s vanishes)"
        )));
    }
    let raw = k / weighted.sqrt();
    let (u_hat, raw_norm) = unit_from_raw(raw)?;

    let x_hat = match (q, zeta) {
        (Some(q), Some(z)) => {
            let mut x = u_hat.apply_matrix(y)?;
            q.apply_in_place(x.view_mut(), true)?;
            Some(SparseMatrix::hard_threshold(&x, z))
        }
        _ => None,
    };
    Ok(RecoveryResult {
        u_hat,
        x_hat,
        diagnostics: Diagnostics {
            c_hat: None,
            c_clamped: false,
            weighted_sum: Some(weighted),
            sign_flipped,
            raw_norm,
            zeta,
        },
    })
}

fn recover_x_single(y: ArrayView2<'_, f64>, h: &HouseholderFactor, zeta: f64) -> Result<SparseMatrix> {
    Ok(SparseMatrix::hard_threshold(&h.apply_matrix(y)?, zeta))
}

/// `HT_ζ(V̂^T Y)`, entrywise `x · 1(|x| >= ζ)`.
pub fn recover_x(y: ArrayView2<'_, f64>, v_hat: &OrthogonalProduct, zeta: f64) -> Result<SparseMatrix> {
    if !(zeta >= 0.0) {
        return Err(Error::InvalidModel(format!("threshold must be non-negative, got {zeta}")));
    }
    let projected = v_hat.apply(y, true)?;
    Ok(SparseMatrix::hard_threshold(&projected, zeta))
}

/// Which prefix vector feeds step `i` of sequential recovery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrefixIndexing {
    /// `s = Z[i+1] = H_{i+1} ... H_m 1`, the row sums of the trailing product.
    #[default]
    Trailing,
    /// `s = Z[i] = H_i ... H_m 1`, which includes the reflector being estimated.
    Inclusive,
}

#[derive(Debug, Clone)]
pub struct SequentialRecovery {
    pub v_hat: OrthogonalProduct,
    pub x_hat: SparseMatrix,
    pub steps: Vec<Diagnostics>,
}

/// Estimates `V = H_1 ... H_m` from `Y = VX` one reflector at a time.
///
/// Prefix vectors `Z[m+1] = 1`, `Z[i] = H_i Z[i+1]` come from `init`
/// (default: `m` identity slots, so every `Z` is the ones vector). Step `i`
/// estimates `H_i` from the current `Y` and then replaces `Y` by `H_i^T Y`.
/// The total cost is `O(nmp)`.
pub fn recover_v_sequential(
    y: ArrayView2<'_, f64>,
    m: usize,
    moments: Moments,
    init: Option<&OrthogonalProduct>,
    zeta: f64,
    indexing: PrefixIndexing,
) -> Result<SequentialRecovery> {
    let n = y.nrows();
    let default_init;
    let init = match init {
        Some(v) => v,
        None => {
            default_init = OrthogonalProduct::identity_slots(n, m);
            &default_init
        }
    };
    check_dim(n, init.dim())?;
    check_dim(m, init.len())?;

    // prefix[i] holds Z[i+1] in 1-based terms, i = 0..=m; prefix[m] = 1
    let mut prefix: Vec<Array1<f64>> = vec![Array1::ones(n); m + 1];
    for (i, slot) in init.reflectors().iter().enumerate().rev() {
        let mut z = prefix[i + 1].clone();
        if let Reflector::Factor(h) = slot {
            h.apply_in_place(z.view_mut())?;
        }
        prefix[i] = z;
    }

    let mut current: Array2<f64> = y.to_owned();
    let mut v_hat = OrthogonalProduct::identity(n);
    let mut steps = Vec::with_capacity(m);
    for i in 0..m {
        let s = match indexing {
            PrefixIndexing::Trailing => &prefix[i + 1],
            PrefixIndexing::Inclusive => &prefix[i],
        };
        let step = estimate_u_hqx(current.view(), s.view(), moments, None, None).map_err(|e| e.at_step(i + 1))?;
        step.u_hat.apply_matrix_in_place(current.view_mut())?;
        steps.push(step.diagnostics);
        v_hat.push(step.u_hat)?;
    }
    let x_hat = SparseMatrix::hard_threshold(&current, zeta);
    Ok(SequentialRecovery { v_hat, x_hat, steps })
}
