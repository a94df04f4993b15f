//! Reductions shared by the estimators and metrics.

use ndarray::{Array1, Array2, ArrayView2, Axis};

/// Neumaier-compensated sum; the result does not depend on blocking or
/// thread count beyond the last couple of ulps.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `Σ_j Y_ij` for every row.
pub fn row_sums(y: ArrayView2<'_, f64>) -> Array1<f64> {
    y.axis_iter(Axis(0))
        .map(|row| compensated_sum(row.iter().copied()))
        .collect()
}

pub fn frobenius_norm(a: ArrayView2<'_, f64>) -> f64 {
    compensated_sum(a.iter().map(|x| x * x)).sqrt()
}

/// `‖a - b‖_F` for same-shape matrices.
pub fn frobenius_distance(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    compensated_sum(a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y))).sqrt()
}

pub fn median(values: &mut [f64]) -> f64 {
    quantile(values, 0.5)
}

/// Linear-interpolation quantile (NaNs sort last).
pub fn quantile(values: &mut [f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let pos = q.clamp(0.0, 1.0) * (values.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    values[lo] + (values[hi] - values[lo]) * frac
}
