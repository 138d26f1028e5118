//! Fock-state amplitudes of the N-replica propagator.
//!
//! The coherent-state propagator of the pulse sequence is
//! `exp(Σ_k α_k ζ^k)`, with ζ^k linear in the final-state conjugates ᾱ_j, β̄_j.
//! Fock amplitudes are mixed partial derivatives of it: one photon in for
//! every replica and either one phonon or one photon out. Both reduce to
//! permanents of rank-one-plus-diagonal matrices with closed forms.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CwlParams;
use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, ln_upper_incomplete_gamma};
use crate::pulse::PulseProtocol;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A complex number stored as `ln|z|` and `arg z`, so that values like
/// `(ε²)^{1024}` stay representable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub ln_abs: f64,
    /// Phase in [0, 2π).
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex { ln_abs: f64::NEG_INFINITY, phase: 0.0 };

    pub fn new(ln_abs: f64, phase: f64) -> Self {
        Self { ln_abs, phase: phase.rem_euclid(2.0 * PI) }
    }

    pub fn from_ln(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn is_zero(&self) -> bool {
        self.ln_abs == f64::NEG_INFINITY
    }

    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.ln_abs.exp(), self.phase)
    }

    /// `|z|^{2/N}`.
    pub fn preprobability(&self, n: u32) -> f64 {
        (2.0 / f64::from(n) * self.ln_abs).exp()
    }
}

/// `[iε²e^{−iΩt_f}(2n+1)π/4]^N · N!/N^N`.
pub fn zero_photon_amplitude(n_replicas: u32, eps2: f64, n_rot: u32, omega: f64, t_f: f64) -> Result<LogComplex> {
    if n_replicas == 0 {
        return Err(Error::param("n_replicas", "must be at least 1"));
    }
    if eps2 == 0.0 {
        return Ok(LogComplex::ZERO);
    }
    let n = f64::from(n_replicas);
    let q = eps2 * f64::from(2 * n_rot + 1) * FRAC_PI_4;
    let ln_abs = n * q.ln() + ln_factorial(u64::from(n_replicas)) - n * n.ln();
    let quarter_turns = f64::from(n_replicas % 4) * FRAC_PI_2;
    let phase = quarter_turns - (n * omega * t_f).rem_euclid(2.0 * PI);
    Ok(LogComplex::new(ln_abs, phase))
}

/// One-photon return amplitude,
/// `c^N (ix/N)^N e^{iN/x} Γ(N+1, iN/x)` with `c = e^{−iω_cav t_f}`;
/// equal to `c^N perm(−I + (ix/N)𝟙𝟙ᵀ)`. At x = 0 it is `(−c)^N`.
pub fn one_photon_amplitude(n_replicas: u32, x: f64, omega_cav: f64, t_f: f64) -> Result<LogComplex> {
    if n_replicas == 0 {
        return Err(Error::param("n_replicas", "must be at least 1"));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::param("x", format!("must be non-negative, got {x}")));
    }
    let n = f64::from(n_replicas);
    let cav_phase = -(n * omega_cav * t_f).rem_euclid(2.0 * PI);
    if x == 0.0 {
        return Ok(LogComplex::new(0.0, cav_phase + f64::from(n_replicas % 2) * PI));
    }
    if x <= 1.0 {
        // (−1)^N Σ_m N!/(N−m)! (−y)^m; successive terms shrink by at least x
        let step = Complex64::new(0.0, -x / n);
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for m in 0..n_replicas {
            term *= step * f64::from(n_replicas - m);
            sum += term;
            if term.norm() <= f64::EPSILON * 1e-3 * sum.norm() {
                break;
            }
        }
        let sign = f64::from(n_replicas % 2) * PI;
        return Ok(LogComplex::new(sum.norm().ln(), sum.arg() + sign + cav_phase));
    }
    let w = Complex64::new(0.0, n / x);
    let ln_y = Complex64::new((x / n).ln(), FRAC_PI_2);
    let ln_gamma = ln_upper_incomplete_gamma(n_replicas + 1, w)?;
    let total = ln_y * n + w + ln_gamma;
    Ok(LogComplex::new(total.re, total.im + cav_phase))
}

/// The same amplitude as a finite sum, `c^N N! Σ_{k=0}^{N} (−1)^k y^{N−k}/k!`
/// with y = ix/N. Limited to N ≤ 170, where N! fits in f64.
pub fn one_photon_amplitude_sum(n_replicas: u32, x: f64, omega_cav: f64, t_f: f64) -> Complex64 {
    assert!(n_replicas <= 170, "N! overflows beyond N = 170");
    let n = f64::from(n_replicas);
    let y = Complex64::new(0.0, x / n);
    // Horner from the y^N coefficient N! down to the constant (−1)^N
    let mut coeff: f64 = (1..=n_replicas).map(f64::from).product();
    let mut acc = Complex64::new(coeff, 0.0);
    for k in 1..=n_replicas {
        coeff *= -1.0 / f64::from(k);
        acc = acc * y + coeff;
    }
    acc * Complex64::from_polar(1.0, -n * omega_cav * t_f)
}

/// The generating function `exp(Σ_k α_k ζ^k(ᾱ, β̄))` of the two-pulse
/// propagator, with
/// `ζ^k = c(−ᾱ_k + ix·Σᾱ/N) + iε²d(2n+1)(π/4)·Σβ̄/N`,
/// c = e^{−iω_cav t_f}, d = e^{−iΩt_f}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratingFunction {
    pub n_replicas: usize,
    pub eps2: f64,
    pub n_rot: u32,
    pub omega: f64,
    /// x = ε²Ω(t_p + T).
    pub x: f64,
    pub omega_cav: f64,
    pub t_f: f64,
}

impl GeneratingFunction {
    pub fn for_protocol(params: &CwlParams, protocol: &PulseProtocol, n_replicas: usize, omega_cav: f64) -> Self {
        let eps2 = params.eps2();
        let omega = params.omega();
        Self {
            n_replicas,
            eps2,
            n_rot: protocol.n,
            omega,
            x: eps2 * omega * (protocol.t_p + protocol.t_wait),
            omega_cav,
            t_f: protocol.total_duration(),
        }
    }

    pub fn zeta(&self, k: usize, abar: &[Complex64], bbar: &[Complex64]) -> Complex64 {
        let n = self.n_replicas as f64;
        let c = Complex64::from_polar(1.0, -self.omega_cav * self.t_f);
        let d = Complex64::from_polar(1.0, -self.omega * self.t_f);
        let sa: Complex64 = abar.iter().sum();
        let sb: Complex64 = bbar.iter().sum();
        let q = I * self.eps2 * d * f64::from(2 * self.n_rot + 1) * FRAC_PI_4;
        c * (-abar[k] + I * self.x * sa / n) + q * sb / n
    }

    pub fn value(&self, alpha: &[Complex64], abar: &[Complex64], bbar: &[Complex64]) -> Complex64 {
        (0..self.n_replicas).map(|k| alpha[k] * self.zeta(k, abar, bbar)).sum::<Complex64>().exp()
    }

    pub fn zero_photon(&self) -> Result<LogComplex> {
        zero_photon_amplitude(self.n_replicas as u32, self.eps2, self.n_rot, self.omega, self.t_f)
    }

    pub fn one_photon(&self) -> Result<LogComplex> {
        one_photon_amplitude(self.n_replicas as u32, self.x, self.omega_cav, self.t_f)
    }
}
