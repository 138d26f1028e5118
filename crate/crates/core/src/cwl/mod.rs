//! Correlated-Worldline engine.
//!
//! A CWL amplitude is computed for N replicas of the system whose paths
//! attract one another; physical probabilities are `lim |K_N|^{2/N}`. In the
//! harmonic (spike) approximation the replica coupling is rank one, acting
//! only on the uniform mode 𝟙, so every matrix here is stored as
//! `diagonal·I + rank_one·𝟙𝟙ᵀ/N` and applied in O(N).
//!
//! Dynamics use ħ = 1; frequencies in rad/s.

mod dynamics;
mod fock;
mod probability;

pub use dynamics::{mean_mode_evolution, regime_ok, replica_solution, sequence_endpoint, MeanModel};
pub use fock::{
    one_photon_amplitude, one_photon_amplitude_sum, zero_photon_amplitude, GeneratingFunction, LogComplex,
};
pub use probability::{cwl_probabilities, finite_n_diagnostic, preprobability_zero, FiniteNDiagnostic};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CwlParams {
    pub omega_m: f64,
    pub omega_sn: f64,
    /// Oscillator mass; only the ground-state matrix depends on it.
    pub mass: f64,
}

impl CwlParams {
    pub fn new(omega_m: f64, omega_sn: f64) -> Result<Self> {
        Self::with_mass(omega_m, omega_sn, 1.0)
    }

    pub fn with_mass(omega_m: f64, omega_sn: f64, mass: f64) -> Result<Self> {
        if !(omega_m > 0.0 && omega_m.is_finite()) {
            return Err(Error::param("omega_m", format!("must be positive, got {omega_m}")));
        }
        if !(omega_sn >= 0.0 && omega_sn.is_finite()) {
            return Err(Error::param("omega_sn", format!("must be non-negative, got {omega_sn}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::param("mass", format!("must be positive, got {mass}")));
        }
        Ok(Self { omega_m, omega_sn, mass })
    }

    /// Build from ω_m and the coupling strength ε² ∈ [0, ½).
    pub fn from_eps2(omega_m: f64, eps2: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&eps2) {
            return Err(Error::param("eps2", format!("must lie in [0, 0.5), got {eps2}")));
        }
        // ε² = ω_SN²/(2Ω²) with Ω² = ω_m² + ω_SN²
        Self::new(omega_m, omega_m * (2.0 * eps2 / (1.0 - 2.0 * eps2)).sqrt())
    }

    /// Ω = √(ω_m² + ω_SN²).
    pub fn omega(&self) -> f64 {
        self.omega_m.hypot(self.omega_sn)
    }

    /// ε² = ω_SN²/(2Ω²).
    pub fn eps2(&self) -> f64 {
        let o = self.omega();
        self.omega_sn * self.omega_sn / (2.0 * o * o)
    }
}

/// (ζ, δ) = (½ ln(Ω/ω_m), (ω_m − Ω)/ω_m).
pub fn squeeze_and_correlation(params: &CwlParams) -> Result<(f64, f64)> {
    if !(params.omega_m > 0.0) {
        return Err(Error::param("omega_m", "must be positive"));
    }
    let r = params.omega_sn / params.omega_m;
    // Ω/ω_m = √(1+r²); ln_1p keeps ζ accurate for small r
    let zeta = 0.25 * (r * r).ln_1p();
    let delta = -(r * r) / (1.0 + (1.0 + r * r).sqrt());
    Ok((zeta, delta))
}

/// Operators of the form `diag·δ^{jk} + rank·𝟙ʲ𝟙ᵏ/N`.
#[derive(Clone, Copy, Debug, PartialEq)]
struct RankOne {
    n: usize,
    diag: f64,
    rank: f64,
}

impl RankOne {
    fn apply<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::iter::Sum<T>,
    {
        assert_eq!(v.len(), self.n, "vector length must equal N");
        let mean = v.iter().copied().sum::<T>() * (1.0 / self.n as f64);
        v.iter().map(|&x| x * self.diag + mean * self.rank).collect()
    }

    fn dense(&self) -> Vec<Vec<f64>> {
        let off = self.rank / self.n as f64;
        (0..self.n)
            .map(|j| (0..self.n).map(|k| if j == k { self.diag + off } else { off }).collect())
            .collect()
    }
}

/// P^{jk} = δ^{jk} − ε²𝟙ʲ𝟙ᵏ/N.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectorMatrix {
    pub n: usize,
    pub eps2: f64,
}

impl ProjectorMatrix {
    pub fn new(n: usize, eps2: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "replica count must be at least 1"));
        }
        if !(0.0..1.0).contains(&eps2) {
            return Err(Error::param("eps2", "must lie in [0, 1)"));
        }
        Ok(Self { n, eps2 })
    }

    fn op(&self) -> RankOne {
        RankOne { n: self.n, diag: 1.0, rank: -self.eps2 }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.op().apply(v)
    }

    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        self.op().apply(v)
    }

    /// P⁻¹v = v + ε²/(1−ε²)·mean(v)·𝟙.
    pub fn solve(&self, v: &[Complex64]) -> Vec<Complex64> {
        RankOne { n: self.n, diag: 1.0, rank: self.eps2 / (1.0 - self.eps2) }.apply(v)
    }

    /// Dense copy for small-N checks.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        self.op().dense()
    }
}

/// A^{jk} = 2mΩδ^{jk} − 2m(Ω − ω_m)𝟙ʲ𝟙ᵏ/N, the inverse width matrix of the
/// CWL ground state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundStateMatrix {
    pub n: usize,
    pub mass: f64,
    pub omega_m: f64,
    pub omega: f64,
}

pub fn ground_state_matrix(n: usize, params: &CwlParams) -> Result<GroundStateMatrix> {
    if n == 0 {
        return Err(Error::param("n", "replica count must be at least 1"));
    }
    Ok(GroundStateMatrix { n, mass: params.mass, omega_m: params.omega_m, omega: params.omega() })
}

impl GroundStateMatrix {
    fn op(&self) -> RankOne {
        RankOne { n: self.n, diag: 2.0 * self.mass * self.omega, rank: -2.0 * self.mass * (self.omega - self.omega_m) }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.op().apply(v)
    }

    /// Eigenvalue on the uniform mode 𝟙.
    pub fn uniform_eigenvalue(&self) -> f64 {
        2.0 * self.mass * self.omega_m
    }

    /// Eigenvalue on the (N−1)-dimensional complement of 𝟙.
    pub fn relative_eigenvalue(&self) -> f64 {
        2.0 * self.mass * self.omega
    }

    pub fn dense(&self) -> Vec<Vec<f64>> {
        self.op().dense()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicaEnsemble {
    /// Photon amplitudes a_j.
    pub a: Vec<Complex64>,
    /// Phonon amplitudes b_j.
    pub b: Vec<Complex64>,
}

impl ReplicaEnsemble {
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::param("replicas", format!("need equal non-zero lengths, got {} and {}", a.len(), b.len())));
        }
        Ok(Self { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// A = N⁻¹Σa_j.
    pub fn mean_a(&self) -> Complex64 {
        self.a.iter().sum::<Complex64>() / self.a.len() as f64
    }

    /// B = N⁻¹Σb_j.
    pub fn mean_b(&self) -> Complex64 {
        self.b.iter().sum::<Complex64>() / self.b.len() as f64
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self { a: perm.iter().map(|&i| self.a[i]).collect(), b: perm.iter().map(|&i| self.b[i]).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    #[test]
    fn params_derived_quantities() {
        let p = CwlParams::new(1.0, 0.0).unwrap();
        assert_eq!(p.omega(), 1.0);
        assert_eq!(p.eps2(), 0.0);
        let p = CwlParams::from_eps2(2.0, 0.02).unwrap();
        assert!((p.eps2() - 0.02).abs() < 1e-15);
        assert!(p.omega() >= p.omega_m);
        let huge = CwlParams::new(1e-3, 1e3).unwrap();
        assert!(huge.eps2() <= 0.5);
        assert!(CwlParams::new(0.0, 1.0).is_err());
        assert!(CwlParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn squeeze_examples() {
        assert_eq!(squeeze_and_correlation(&CwlParams::new(3.0, 0.0).unwrap()).unwrap(), (0.0, 0.0));
        let (z, d) = squeeze_and_correlation(&CwlParams::new(1.0, 0.1).unwrap()).unwrap();
        assert!((z - 0.25 * 1.01f64.ln()).abs() < 1e-16);
        assert!((d - (1.0 - 1.01f64.sqrt())).abs() < 1e-16);
        assert!((z - 0.0024875).abs() < 1e-7);
        assert!((d + 0.0049876).abs() < 1e-7);
        assert!((z - 0.01 / 4.0).abs() < 2e-5);
        assert!((d + 0.01 / 2.0).abs() < 2e-5);
    }

    #[test]
    fn squeeze_series_remainder_is_quartic() {
        let mut worst: f64 = 0.0;
        for i in 1..=30 {
            let r = 0.01 * i as f64;
            let (z, _) = squeeze_and_correlation(&CwlParams::new(1.0, r).unwrap()).unwrap();
            worst = worst.max((z - r * r / 4.0).abs() / r.powi(4));
        }
        assert!(worst < 0.2, "{worst}");
    }

    #[test]
    fn projector_identities() {
        let p = ProjectorMatrix::new(5, 0.1).unwrap();
        let ones = vec![1.0; 5];
        for v in p.apply_real(&ones) {
            assert!((v - 0.9).abs() < 1e-15);
        }
        let perp = vec![1.0, -1.0, 2.0, 0.0, -2.0];
        assert_eq!(p.apply_real(&perp), perp);

        // P² = V + O(ε⁴) with V = I − (ω_SN²/Ω²)𝟙𝟙/N = I − 2ε²𝟙𝟙/N
        let v: Vec<Complex64> = (0..5).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect();
        let p2 = p.apply(&p.apply(&v));
        let v_op = RankOne { n: 5, diag: 1.0, rank: -2.0 * p.eps2 }.apply(&v);
        let mean = v.iter().sum::<Complex64>() / 5.0;
        for (x, y) in p2.iter().zip(&v_op) {
            assert!(((x - y) - mean * p.eps2 * p.eps2).norm() < 1e-14);
        }
        let back = p.apply(&p.solve(&v));
        for (x, y) in back.iter().zip(&v) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn ground_matrix_eigenstructure_dense_oracle() {
        for n in 1..=8 {
            let params = CwlParams::with_mass(1.3, 0.7, 2.5).unwrap();
            let a = ground_state_matrix(n, &params).unwrap();
            let m = DMatrix::from_fn(n, n, |i, j| a.dense()[i][j]);
            let eig = SymmetricEigen::new(m.clone());
            let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
            vals.sort_by(f64::total_cmp);
            assert!((vals[0] - a.uniform_eigenvalue()).abs() < 1e-10);
            for v in &vals[1..] {
                assert!((v - a.relative_eigenvalue()).abs() < 1e-10);
            }
            let ones = vec![1.0; n];
            for v in a.apply(&ones) {
                assert!((v - 2.0 * params.mass * params.omega_m).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_matrix_is_identity_without_gravity() {
        let a = ground_state_matrix(4, &CwlParams::with_mass(2.0, 0.0, 3.0).unwrap()).unwrap();
        let d = a.dense();
        for (j, row) in d.iter().enumerate() {
            for (k, &x) in row.iter().enumerate() {
                assert_eq!(x, if j == k { 12.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn ensemble_validation_and_means() {
        assert!(ReplicaEnsemble::new(vec![], vec![]).is_err());
        assert!(ReplicaEnsemble::new(vec![Complex64::new(1.0, 0.0)], vec![]).is_err());
        let e = ReplicaEnsemble::new(
            vec![Complex64::new(1.0, 0.0), Complex64::new(3.0, 2.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 3.0)],
        )
        .unwrap();
        assert_eq!(e.mean_a(), Complex64::new(2.0, 1.0));
        assert_eq!(e.mean_b(), Complex64::new(0.0, 2.0));
    }
}
