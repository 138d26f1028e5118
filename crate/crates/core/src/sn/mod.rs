//! Schrödinger–Newton engine.
//!
//! Under continuous position measurement the SN state stays Gaussian, so it
//! is fully described by the conditional means (⟨x⟩, ⟨p⟩) and the covariance
//! triple (V_xx, V_xp, V_pp). The self-gravity term acts on fluctuations
//! about ⟨x⟩, so covariances oscillate at Ω = √(ω_m² + ω_SN²) while the means
//! oscillate at ω_m.
//!
//! Dynamics carry ħ explicitly in [`SnParams::hbar`] (default 1).
//! [`thermal_p0`] and [`feasibility`] work in SI units.

mod pulse;
mod thermal;
mod trajectory;

pub use pulse::{pulse_transfer, sn_prediction, sn_pulse_p0, SnPulseResult};
pub use thermal::{feasibility, thermal_p0, Feasibility, ThermalEstimate};
pub use trajectory::{
    default_dt, simulate_ensemble, simulate_final, simulate_trajectory, MeasurementRecord, Trajectory,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnParams {
    pub hbar: f64,
    pub mass: f64,
    pub omega_m: f64,
    pub omega_sn: f64,
    /// Measurement strength α.
    pub alpha: f64,
    /// Designed optomechanical coupling g₀.
    pub g0: f64,
}

impl SnParams {
    /// ħ = m = 1, α = 0 and g₀ = ω_m.
    pub fn new(omega_m: f64, omega_sn: f64) -> Result<Self> {
        Self::with_lambda(1.0, omega_m, omega_sn, 0.0)
    }

    /// Set α from the dimensionless Λ = √(ħα²/(mΩ²)), with ħ = 1.
    pub fn with_lambda(mass: f64, omega_m: f64, omega_sn: f64, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", format!("must be non-negative, got {lambda}")));
        }
        let mut p = Self { hbar: 1.0, mass, omega_m, omega_sn, alpha: 0.0, g0: omega_m };
        p.validate()?;
        p.alpha = lambda * p.omega() * (mass / p.hbar).sqrt();
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("hbar", self.hbar), ("mass", self.mass), ("omega_m", self.omega_m)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.omega_sn >= 0.0 && self.omega_sn.is_finite()) {
            return Err(Error::param("omega_sn", format!("must be non-negative, got {}", self.omega_sn)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::param("alpha", format!("must be non-negative, got {}", self.alpha)));
        }
        if !(self.g0 > 0.0 && self.g0.is_finite()) {
            return Err(Error::param("g0", format!("must be positive, got {}", self.g0)));
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        self.omega_m.hypot(self.omega_sn)
    }

    pub fn eps2(&self) -> f64 {
        let o = self.omega();
        self.omega_sn * self.omega_sn / (2.0 * o * o)
    }

    pub fn lambda(&self) -> f64 {
        (self.hbar * self.alpha * self.alpha / self.mass).sqrt() / self.omega()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConditionalGaussianState {
    pub mean_x: f64,
    pub mean_p: f64,
    pub vxx: f64,
    pub vxp: f64,
    pub vpp: f64,
}

impl ConditionalGaussianState {
    pub fn covariance(&self) -> [f64; 3] {
        [self.vxx, self.vxp, self.vpp]
    }

    pub fn with_covariance(mut self, v: [f64; 3]) -> Self {
        self.vxx = v[0];
        self.vxp = v[1];
        self.vpp = v[2];
        self
    }

    /// V_xx V_pp − V_xp².
    pub fn determinant(&self) -> f64 {
        self.vxx * self.vpp - self.vxp * self.vxp
    }

    /// Positive variances and the uncertainty bound det ≥ ħ²/4 (with a
    /// relative slack of 1e-12).
    pub fn is_physical(&self, hbar: f64) -> bool {
        self.vxx > 0.0 && self.vpp > 0.0 && self.determinant() >= 0.25 * hbar * hbar * (1.0 - 1e-12)
    }
}

/// Steady conditional covariance with s = √(1+Λ⁴):
/// V_xx = ħ/(√2 mΩ √(1+s)), V_xp = (ħ/2)Λ²/(1+s), V_pp = ħmΩ s/(√2 √(1+s)).
pub fn steady_covariance(params: &SnParams) -> ConditionalGaussianState {
    let (h, m, o) = (params.hbar, params.mass, params.omega());
    let l2 = params.lambda().powi(2);
    let s = (1.0 + l2 * l2).sqrt();
    let root = (1.0 + s).sqrt();
    ConditionalGaussianState {
        mean_x: 0.0,
        mean_p: 0.0,
        vxx: h / (std::f64::consts::SQRT_2 * m * o * root),
        vxp: 0.5 * h * l2 / (1.0 + s),
        vpp: h * m * o * s / (std::f64::consts::SQRT_2 * root),
    }
}

/// The steady state with V_pp exactly as it is usually printed,
/// (mΩ/√2)·s/(1+s). It is not a fixed point of [`covariance_riccati_rhs`]
/// and is kept for comparison output only.
pub fn steady_covariance_printed(params: &SnParams) -> ConditionalGaussianState {
    let l2 = params.lambda().powi(2);
    let s = (1.0 + l2 * l2).sqrt();
    let vpp = params.mass * params.omega() / std::f64::consts::SQRT_2 * s / (1.0 + s);
    ConditionalGaussianState { vpp, ..steady_covariance(params) }
}

/// Time derivative of (V_xx, V_xp, V_pp) under the conditional master equation:
///
/// ```text
/// V̇xx = 2Vxp/m − 2α²Vxx²
/// V̇xp = Vpp/m − mΩ²Vxx − 2α²VxxVxp
/// V̇pp = −2mΩ²Vxp − 2α²Vxp² + ħ²α²/2
/// ```
pub fn covariance_riccati_rhs(v: [f64; 3], params: &SnParams) -> [f64; 3] {
    let [xx, xp, pp] = v;
    let m = params.mass;
    let o2 = params.omega().powi(2);
    let a2 = params.alpha * params.alpha;
    [
        2.0 * xp / m - 2.0 * a2 * xx * xx,
        pp / m - m * o2 * xx - 2.0 * a2 * xx * xp,
        -2.0 * m * o2 * xp - 2.0 * a2 * xp * xp + 0.5 * params.hbar * params.hbar * a2,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integrate, OdeProblem};

    fn params(lambda: f64) -> SnParams {
        SnParams::with_lambda(1.7, 1.0, 0.4, lambda).unwrap()
    }

    #[test]
    fn lambda_round_trip() {
        for l in [0.0, 0.1, 1.0, 3.0, 10.0] {
            assert!((params(l).lambda() - l).abs() < 1e-13 * l.max(1.0));
        }
        assert!(SnParams::with_lambda(1.0, 1.0, 0.1, -1.0).is_err());
        assert!(SnParams::with_lambda(0.0, 1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn steady_state_is_riccati_fixed_point() {
        for l in [0.0, 0.1, 1.0, 3.0, 10.0] {
            let p = params(l);
            let s = steady_covariance(&p);
            let d = covariance_riccati_rhs(s.covariance(), &p);
            // scale each component by the size of its largest term
            let m = p.mass;
            let o2 = p.omega().powi(2);
            let a2 = p.alpha * p.alpha;
            let scales = [2.0 * s.vxp.abs() / m + 2.0 * a2 * s.vxx * s.vxx, s.vpp / m, 2.0 * m * o2 * s.vxp.abs() + 0.5 * a2 * p.hbar.powi(2)];
            for (dv, sc) in d.iter().zip(scales) {
                let sc = if sc == 0.0 { 1.0 } else { sc };
                assert!(dv.abs() <= 1e-10 * sc, "Λ={l}: {d:?}");
            }
        }
    }

    #[test]
    fn ground_state_limit() {
        let p = params(0.0);
        let s = steady_covariance(&p);
        let o = p.omega();
        assert!((s.vxx - 1.0 / (2.0 * p.mass * o)).abs() < 1e-15);
        assert_eq!(s.vxp, 0.0);
        assert!((s.vpp - p.mass * o / 2.0).abs() < 1e-14);
        let vacuum = 1.0 / (2.0 * p.mass * p.omega_m);
        assert!((s.vxx / vacuum - p.omega_m / o).abs() < 1e-12);
        assert!((s.determinant() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn lambda_one_value() {
        let p = params(1.0);
        let s = steady_covariance(&p);
        let want = (1.0 + 2f64.sqrt()).powf(-0.5) / 2f64.sqrt();
        assert!((s.vxx * p.mass * p.omega() - want).abs() < 1e-15);
        assert!((want - 0.4551).abs() < 1e-4);
    }

    #[test]
    fn uncertainty_holds() {
        for i in 0..50 {
            let l = 0.2 * i as f64;
            let s = steady_covariance(&params(l));
            assert!(s.is_physical(1.0), "Λ={l}");
        }
    }

    #[test]
    fn printed_variant_fails_fixed_point() {
        let p = SnParams::with_lambda(2.0, 1.0, 0.4, 1.0).unwrap();
        let s = steady_covariance_printed(&p);
        let d = covariance_riccati_rhs(s.covariance(), &p);
        assert!(d[1].abs() > 1e-3);
    }

    #[test]
    fn free_covariance_rotates_at_omega() {
        let mut p = params(0.0);
        p.alpha = 0.0;
        let o = p.omega();
        let v0 = [0.9, 0.2, 1.4];
        let sol = integrate(OdeProblem {
            rhs: |_t: f64, v: &Vec<f64>| covariance_riccati_rhs([v[0], v[1], v[2]], &p).to_vec(),
            t0: 0.0,
            t1: std::f64::consts::PI / o,
            y0: v0.to_vec(),
            tolerance: 1e-12,
            initial_step: None,
        })
        .unwrap();
        // half a period of the Ω oscillator maps (x, p) → (−x, −p), so V returns
        for (a, b) in sol.last().iter().zip(v0) {
            assert!((a - b).abs() < 1e-9);
        }
        // analytic rotation at a quarter period swaps scaled x and p variances
        let q = integrate(OdeProblem {
            rhs: |_t: f64, v: &Vec<f64>| covariance_riccati_rhs([v[0], v[1], v[2]], &p).to_vec(),
            t0: 0.0,
            t1: 0.5 * std::f64::consts::PI / o,
            y0: v0.to_vec(),
            tolerance: 1e-12,
            initial_step: None,
        })
        .unwrap();
        let mo = p.mass * o;
        let v = q.last();
        assert!((v[0] - v0[2] / (mo * mo)).abs() < 1e-9);
        assert!((v[2] - v0[0] * mo * mo).abs() < 1e-9);
        assert!((v[1] + v0[1]).abs() < 1e-9);
    }
}
