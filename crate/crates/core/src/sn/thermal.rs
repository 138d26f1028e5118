use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalEstimate {
    /// p₀^th = 2ω_m t_p k_BT/(ħω_m Q).
    pub p0_th: f64,
    /// k_BT/(ħω_m Q), the thermal phonons injected per mechanical cycle.
    pub occupation_rate: f64,
    /// occupation_rate ≤ 1.
    pub regime_ok: bool,
}

/// Zero-photon probability caused by the thermal force during the pulses.
/// SI inputs: rad/s, dimensionless Q, kelvin, seconds.
pub fn thermal_p0(omega_m: f64, q_factor: f64, temperature: f64, t_p: f64) -> Result<ThermalEstimate> {
    if !(omega_m > 0.0) {
        return Err(Error::param("omega_m", "must be positive"));
    }
    if !(q_factor > 0.0) {
        return Err(Error::param("q_factor", "must be positive"));
    }
    if !(temperature >= 0.0) {
        return Err(Error::param("temperature", "must be non-negative"));
    }
    if !(t_p > 0.0) {
        return Err(Error::param("t_p", "must be positive"));
    }
    let rate = K_B * temperature / (HBAR * omega_m * q_factor);
    Ok(ThermalEstimate { p0_th: 2.0 * omega_m * t_p * rate, occupation_rate: rate, regime_ok: rate <= 1.0 })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feasibility {
    pub omega_sn: f64,
    /// Largest T/Q (K) for which thermal noise stays below `target` phonons
    /// per SN cycle.
    pub t_over_q_max_k: f64,
    pub target: f64,
}

/// With ω_m ≈ ω_SN: T/Q < target·ħω_SN/k_B.
pub fn feasibility(omega_sn: f64, target: f64) -> Result<Feasibility> {
    if !(omega_sn > 0.0) {
        return Err(Error::param("omega_sn", "must be positive"));
    }
    if !(target > 0.0) {
        return Err(Error::param("target", "must be positive"));
    }
    Ok(Feasibility { omega_sn, t_over_q_max_k: target * HBAR * omega_sn / K_B, target })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::RngStream;
    use rand::Rng;
    use rand_distr::StandardNormal;
    use std::f64::consts::PI;

    #[test]
    fn formula_examples() {
        let omega_m = 3.0;
        let q = 1e6;
        // choose T so that k_BT/(ħω_mQ) = 0.5
        let t = 0.5 * HBAR * omega_m * q / K_B;
        let e = thermal_p0(omega_m, q, t, 1.0 / omega_m).unwrap();
        assert!((e.p0_th - 1.0).abs() < 1e-12);
        assert!(e.regime_ok);
        assert_eq!(thermal_p0(omega_m, q, 0.0, 1.0).unwrap().p0_th, 0.0);
        assert!(thermal_p0(0.0, q, 1.0, 1.0).is_err());
    }

    #[test]
    fn regime_flag_flips_at_one() {
        let (w, q) = (2.0, 1e5);
        let t_edge = HBAR * w * q / K_B;
        assert!(thermal_p0(w, q, t_edge * (1.0 - 1e-9), 1.0).unwrap().regime_ok);
        assert!(!thermal_p0(w, q, t_edge * (1.0 + 1e-9), 1.0).unwrap().regime_ok);
    }

    #[test]
    fn stochastic_integral_oracle() {
        // A(2t_p) + A(0) = −i∫F sin(gt)dt with g = (n+½)π/t_p; each quadrature
        // of F is white with two-sided density S = 2γ_m k_BT/(ħω_m).
        let (omega_m, q, temp, t_p, n) = (2.0, 1e6, 1e-3, 0.9, 1u32);
        let est = thermal_p0(omega_m, q, temp, t_p).unwrap();
        let gamma_m = omega_m / (2.0 * q);
        let s = 2.0 * gamma_m * K_B * temp / (HBAR * omega_m);
        let g = (f64::from(n) + 0.5) * PI / t_p;
        let steps = 400;
        let dt = 2.0 * t_p / steps as f64;
        let seeds = 10_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for k in 0..seeds {
            let mut rng = RngStream::with_index(77, k).rng();
            let (mut re, mut im) = (0.0, 0.0);
            for j in 0..steps {
                let t = (j as f64 + 0.5) * dt;
                let w = (g * t).sin() * (s * dt).sqrt();
                re += w * rng.sample::<f64, _>(StandardNormal);
                im += w * rng.sample::<f64, _>(StandardNormal);
            }
            let v = re * re + im * im;
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / seeds as f64;
        let var = sum_sq / seeds as f64 - mean * mean;
        let se = (var / seeds as f64).sqrt();
        assert!((mean - est.p0_th).abs() < 3.0 * se, "{mean} vs {} ± {se}", est.p0_th);
    }

    #[test]
    fn feasibility_threshold() {
        let f = feasibility(2.0 * PI * 4.0e-3, 1.0).unwrap();
        assert!((f.t_over_q_max_k - 1.9e-13).abs() < 0.05e-13, "{:e}", f.t_over_q_max_k);
        let double = feasibility(4.0 * PI * 4.0e-3, 1.0).unwrap();
        assert!((double.t_over_q_max_k / f.t_over_q_max_k - 2.0).abs() < 1e-14);
        assert!(feasibility(0.0, 1.0).is_err());
    }
}
