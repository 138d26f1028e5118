use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SnParams;
use crate::error::{Error, Result};
use crate::prediction::{Diagnostics, Theory, TheoryPrediction};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub type Mat2 = [[Complex64; 2]; 2];

/// Photon/phonon transfer matrix for a pulse of length t:
///
/// ```text
/// e^{−iΔt/2} [[cosΦ − iΔ sinΦ/r,  −2ig sinΦ/r      ],
///             [−2ig sinΦ/r,        cosΦ + iΔ sinΦ/r]]
/// ```
///
/// with g = g₀√(ω_m/Ω), Δ = ω_m − Ω, r = √(4g² + Δ²) and Φ = rt/2.
pub fn pulse_transfer(params: &SnParams, t: f64) -> Mat2 {
    let omega = params.omega();
    let g = params.g0 * (params.omega_m / omega).sqrt();
    let delta = params.omega_m - omega;
    let r = (4.0 * g * g + delta * delta).sqrt();
    let phi = 0.5 * r * t;
    let (sin, cos) = phi.sin_cos();
    let phase = Complex64::from_polar(1.0, -0.5 * delta * t);
    let off = -I * 2.0 * g * sin / r;
    [
        [phase * (cos - I * delta * sin / r), phase * off],
        [phase * off, phase * (cos + I * delta * sin / r)],
    ]
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnPulseResult {
    /// Reported zero-photon probability, the leading-order form.
    pub p0: f64,
    pub p1: f64,
    /// ((2n+1)π/4)²ε⁴.
    pub p0_leading: f64,
    /// |⟨phonon| U_p D(T) U_p |photon⟩|² from the exact transfer matrices.
    pub p0_exact: f64,
    /// Pulse length (n+½)π/g₀.
    pub t_p: f64,
}

/// Photon-return statistics for two (n+½)π pulses separated by `t_wait`.
///
/// The exact composition comes out four times the leading-order form; both
/// are reported.
pub fn sn_pulse_p0(params: &SnParams, n: u32, t_wait: f64) -> Result<SnPulseResult> {
    params.validate()?;
    if !(t_wait >= 0.0 && t_wait.is_finite()) {
        return Err(Error::param("t_wait", format!("must be non-negative, got {t_wait}")));
    }
    let eps2 = params.eps2();
    let f = f64::from(2 * n + 1) * PI / 4.0;
    let p0_leading = f * f * eps2 * eps2;

    let t_p = (f64::from(n) + 0.5) * PI / params.g0;
    let u = pulse_transfer(params, t_p);
    let delta = params.omega_m - params.omega();
    let free = [[Complex64::from_polar(1.0, -delta * t_wait), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
    let total = mul(&u, &mul(&free, &u));
    let p0_exact = total[1][0].norm_sqr();

    Ok(SnPulseResult { p0: p0_leading, p1: 1.0 - p0_leading, p0_leading, p0_exact, t_p })
}

/// SN branch of the three-theory comparison.
pub fn sn_prediction(params: &SnParams, n: u32, t_wait: f64) -> Result<TheoryPrediction> {
    let r = sn_pulse_p0(params, n, t_wait)?;
    let eps2 = params.eps2();
    let regime_ok = eps2 < 0.25;
    let mut diagnostics = Diagnostics { regime_ok, eps2, lambda: Some(params.lambda()), ..Default::default() };
    if !regime_ok {
        diagnostics.notes.push(format!("eps2 = {eps2:.3} is outside the leading-order regime"));
    }
    Ok(TheoryPrediction { theory: Theory::Sn, p0: r.p0, p1: r.p1, diagnostics })
}
