use nalgebra::{DMatrix, DVector};

/// Weighted ridge fit of `y ~ intercept + x . coef`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

/// Relative size below which a triangular pivot counts as zero.
const RANK_TOLERANCE: f64 = 1e-10;

/// Minimizes `sum_i w_i (y_i - b - x_i . c)^2 + ridge * |c|^2` with the
/// intercept unpenalized.
///
/// Solved by QR on the row-scaled design augmented with `sqrt(ridge)`
/// penalty rows. Returns `None` when the system is rank deficient.
pub fn fit_weighted_ridge(
    features: &[Vec<f64>],
    targets: &[f64],
    weights: &[f64],
    ridge: f64,
) -> Option<LinearFit> {
    let rows = features.len();
    if rows == 0 || targets.len() != rows || weights.len() != rows || ridge < 0.0 {
        return None;
    }
    let p = features[0].len();
    let penalty_rows = if ridge > 0.0 { p } else { 0 };
    let total = rows + penalty_rows;
    let cols = p + 1;
    if total < cols {
        return None;
    }

    let mut a = DMatrix::<f64>::zeros(total, cols);
    let mut b = DVector::<f64>::zeros(total);
    for (i, ((x, &y), &w)) in features.iter().zip(targets).zip(weights).enumerate() {
        let s = w.max(0.0).sqrt();
        a[(i, 0)] = s;
        for (j, &v) in x.iter().enumerate() {
            a[(i, j + 1)] = s * v;
        }
        b[i] = s * y;
    }
    let sr = ridge.sqrt();
    for j in 0..penalty_rows {
        a[(rows + j, j + 1)] = sr;
    }

    let qr = a.qr();
    let r = qr.r();
    let max_diag = (0..cols).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if max_diag == 0.0 || (0..cols).any(|i| r[(i, i)].abs() <= RANK_TOLERANCE * max_diag) {
        return None;
    }
    let qtb = qr.q().transpose() * b;
    let beta = r.solve_upper_triangular(&qtb)?;
    if beta.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(LinearFit {
        intercept: beta[0],
        coefficients: beta.iter().skip(1).copied().collect(),
    })
}
