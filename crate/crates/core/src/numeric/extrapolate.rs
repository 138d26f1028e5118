//! Least-squares extrapolation of a sequence to `N → ∞` with the model
//! `a + b/N + c·ln(N)/N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitFit {
    /// Intercept `a`, the extrapolated limit.
    pub limit: f64,
    pub coeff_inv_n: f64,
    pub coeff_log_n: f64,
    /// Largest absolute residual over the fitted samples.
    pub max_residual: f64,
}

/// Fit `(N, value)` samples; needs at least four samples with strictly
/// increasing `N`.
pub fn extrapolate_limit(samples: &[(f64, f64)]) -> Result<LimitFit> {
    if samples.len() < 4 {
        return Err(Error::param("samples", format!("need at least 4, got {}", samples.len())));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) || samples[0].0 <= 0.0 {
        return Err(Error::param("samples", "N must be positive and strictly increasing"));
    }

    let rows: Vec<[f64; 3]> = samples.iter().map(|&(n, _)| [1.0, 1.0 / n, n.ln() / n]).collect();
    let rhs: Vec<f64> = samples.iter().map(|&(_, v)| v).collect();
    let coef = least_squares_3(&rows, &rhs);

    let max_residual = rows
        .iter()
        .zip(&rhs)
        .map(|(r, y)| (r[0] * coef[0] + r[1] * coef[1] + r[2] * coef[2] - y).abs())
        .fold(0.0, f64::max);

    Ok(LimitFit { limit: coef[0], coeff_inv_n: coef[1], coeff_log_n: coef[2], max_residual })
}

/// Householder QR solve of an m×3 least-squares problem.
fn least_squares_3(rows: &[[f64; 3]], rhs: &[f64]) -> [f64; 3] {
    let m = rows.len();
    let mut a: Vec<[f64; 3]> = rows.to_vec();
    let mut b = rhs.to_vec();

    for k in 0..3 {
        let norm = (k..m).map(|i| a[i][k] * a[i][k]).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..3 {
            let dot: f64 = (k..m).map(|i| v[i - k] * a[i][j]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                a[i][j] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            b[i] -= f * v[i - k];
        }
    }

    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = ((k + 1)..3).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ln_factorial;

    fn grid() -> Vec<f64> {
        (3..=10).map(|p| f64::from(1u32 << p)).collect()
    }

    #[test]
    fn exact_model_is_recovered() {
        let s: Vec<_> = grid().into_iter().map(|n| (n, 0.75 - 2.0 / n)).collect();
        let fit = extrapolate_limit(&s).unwrap();
        assert!((fit.limit - 0.75).abs() < 1e-12, "{fit:?}");
        assert!(fit.coeff_log_n.abs() < 1e-9);
    }

    #[test]
    fn stirling_sequence_limit() {
        // (N!/N^N)^{2/N} → e^{-2}
        let s: Vec<_> = grid()
            .into_iter()
            .map(|n| (n, (2.0 / n * (ln_factorial(n as u64) - n * n.ln())).exp()))
            .collect();
        let fit = extrapolate_limit(&s).unwrap();
        let want = (-2.0f64).exp();
        assert!((fit.limit - want).abs() / want < 0.01, "{fit:?}");
    }

    #[test]
    fn noisy_constant_stays_in_band() {
        let s: Vec<_> = grid()
            .into_iter()
            .enumerate()
            .map(|(i, n)| (n, 3.0 + if i % 2 == 0 { 1e-6 } else { -1e-6 }))
            .collect();
        let fit = extrapolate_limit(&s).unwrap();
        assert!((fit.limit - 3.0).abs() < 1e-5, "{fit:?}");
    }

    #[test]
    fn rejects_short_or_unsorted_input() {
        assert!(extrapolate_limit(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
        assert!(extrapolate_limit(&[(1.0, 1.0), (3.0, 1.0), (2.0, 1.0), (4.0, 1.0)]).is_err());
    }
}
