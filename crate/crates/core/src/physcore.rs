//! Material and geometry physics of the mirror, in SI units.
//!
//! Covers the nuclear zero-point length ξ₀(T) in a Debye model, the shape
//! constant γ of the body, the inter-path potentials (a slowly varying bulk
//! well and a narrow "spike" of range ξ₀), the oscillation frequencies inside
//! each, and the relaxation time of the internal path degrees of freedom.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{AMU, G, HBAR, K_B};
use crate::error::{Error, Result};
use crate::numeric::{mc_integrate, McEstimate, RngStream};

/// Default number of point pairs for the γ Monte Carlo estimate.
pub const DEFAULT_GAMMA_PAIRS: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub name: String,
    /// Bulk density ρ₀, kg/m³.
    pub density: f64,
    /// Ionic mass m, kg.
    pub ionic_mass: f64,
    /// Debye energy θ_D = k_B·Θ_D, J.
    pub debye_energy: f64,
    /// Typical lattice spacing a₀, m.
    pub lattice_spacing: f64,
}

impl MaterialSpec {
    pub fn new(
        name: impl Into<String>,
        density: f64,
        ionic_mass: f64,
        debye_energy: f64,
        lattice_spacing: f64,
    ) -> Result<Self> {
        let spec = Self { name: name.into(), density, ionic_mass, debye_energy, lattice_spacing };
        spec.validate()?;
        Ok(spec)
    }

    /// Build from the units used in config files: amu and kelvin.
    pub fn from_lab_units(
        name: impl Into<String>,
        density_kg_m3: f64,
        ionic_mass_amu: f64,
        debye_temp_k: f64,
        lattice_spacing_m: f64,
    ) -> Result<Self> {
        Self::new(name, density_kg_m3, ionic_mass_amu * AMU, debye_temp_k * K_B, lattice_spacing_m)
    }

    /// Amorphous silica, mean ion of SiO₂.
    pub fn silica() -> Self {
        Self::from_lab_units("SiO2", 2200.0, 60.08 / 3.0, 470.0, 1.6e-10).expect("valid preset")
    }

    pub fn tungsten() -> Self {
        Self::from_lab_units("W", 19_250.0, 183.84, 400.0, 2.74e-10).expect("valid preset")
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("density", self.density),
            ("ionic_mass", self.ionic_mass),
            ("debye_energy", self.debye_energy),
            ("lattice_spacing", self.lattice_spacing),
        ];
        for (field, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidMaterial(format!("{}: {field} must be positive, got {v}", self.name)));
            }
        }
        Ok(())
    }
}

/// A homogeneous body that can be sampled uniformly.
pub trait SolidBody: Sync {
    fn volume(&self) -> f64;
    /// Map `u ∈ [0,1)³` to a uniformly distributed interior point.
    fn map_unit(&self, u: &[f64]) -> [f64; 3];
}

/// Cylindrical mirror: radius R₀, thickness L₀ along the direction of motion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MirrorGeometry {
    pub radius: f64,
    pub thickness: f64,
}

impl MirrorGeometry {
    pub fn new(radius: f64, thickness: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || !(thickness > 0.0 && thickness.is_finite()) {
            return Err(Error::InvalidGeometry(format!("radius and thickness must be positive, got ({radius}, {thickness})")));
        }
        Ok(Self { radius, thickness })
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.radius * factor, self.thickness * factor)
    }

    pub fn mass(&self, material: &MaterialSpec) -> f64 {
        material.density * self.volume()
    }
}

impl SolidBody for MirrorGeometry {
    fn volume(&self) -> f64 {
        PI * self.radius * self.radius * self.thickness
    }

    fn map_unit(&self, u: &[f64]) -> [f64; 3] {
        let r = self.radius * u[0].sqrt();
        let phi = 2.0 * PI * u[1];
        [r * phi.cos(), r * phi.sin(), self.thickness * (u[2] - 0.5)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sphere {
    pub radius: f64,
}

impl SolidBody for Sphere {
    fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.radius.powi(3)
    }

    fn map_unit(&self, u: &[f64]) -> [f64; 3] {
        let r = self.radius * u[0].cbrt();
        let cos_t = 1.0 - 2.0 * u[1];
        let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
        let phi = 2.0 * PI * u[2];
        [r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t]
    }
}

/// `∫₀^X u/(eᵘ − 1) du`.
fn bose_integral(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < 2.0 {
        // Taylor coefficients of u/(eᵘ−1): Σ_{k≤n} a_k/(n−k+1)! = δ_{n0}
        const TERMS: usize = 48;
        let mut inv_fact = [0.0f64; TERMS + 2];
        inv_fact[0] = 1.0;
        for k in 1..inv_fact.len() {
            inv_fact[k] = inv_fact[k - 1] / k as f64;
        }
        let mut a = [0.0f64; TERMS];
        a[0] = 1.0;
        for n in 1..TERMS {
            a[n] = -(0..n).map(|k| a[k] * inv_fact[n - k + 1]).sum::<f64>();
        }
        let mut sum = 0.0;
        let mut pow = x;
        for (n, an) in a.iter().enumerate() {
            sum += an * pow / (n as f64 + 1.0);
            pow *= x;
        }
        sum
    } else {
        // π²/6 − Σ_k e^{−kX}(X/k + 1/k²)
        let mut tail = 0.0;
        for k in 1..200 {
            let kf = k as f64;
            let t = (-kf * x).exp() * (x / kf + 1.0 / (kf * kf));
            tail += t;
            if t < 1e-18 {
                break;
            }
        }
        PI * PI / 6.0 - tail
    }
}

/// `∫₀^{θ_D} E/(e^{E/kT} − 1) dE` for energies in joules.
pub fn debye_occupation_integral(debye_energy: f64, temperature: f64) -> f64 {
    let kt = K_B * temperature;
    if kt <= 0.0 {
        return 0.0;
    }
    kt * kt * bose_integral(debye_energy / kt)
}

/// RMS zero-point-plus-thermal displacement of an ion, Debye model:
/// ξ₀² = (9ħ²/m)[1/(4θ_D) + θ_D⁻³ ∫₀^{θ_D} E/(e^{E/kT} − 1) dE].
pub fn xi0(material: &MaterialSpec, temperature: f64) -> Result<f64> {
    material.validate()?;
    if !(temperature >= 0.0) {
        return Err(Error::param("temperature", format!("must be non-negative, got {temperature}")));
    }
    let theta = material.debye_energy;
    let bracket = 0.25 / theta + debye_occupation_integral(theta, temperature) / theta.powi(3);
    Ok((9.0 * HBAR * HBAR / material.ionic_mass * bracket).sqrt())
}

/// γ = V₀^{−5/3} ∫∫ d³r d³r′ / |r − r′|, by Monte Carlo over point pairs.
pub fn shape_gamma<B: SolidBody>(body: &B, pairs: u64, stream: RngStream) -> McEstimate {
    let scale = body.volume().cbrt();
    mc_integrate(
        6,
        scale,
        |u| {
            let p = body.map_unit(&u[0..3]);
            let q = body.map_unit(&u[3..6]);
            vec![p[0] - q[0], p[1] - q[1], p[2] - q[2]]
        },
        |d| {
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            // coincident pairs have probability zero
            if r > 0.0 { 1.0 / r } else { 0.0 }
        },
        pairs,
        stream,
    )
}

/// erf(x)/x, continuous through x = 0.
pub fn erf_over_x(x: f64) -> f64 {
    const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
    if x.abs() < 1e-3 {
        let x2 = x * x;
        TWO_OVER_SQRT_PI * (1.0 - x2 / 3.0 + x2 * x2 / 10.0 - x2 * x2 * x2 / 42.0)
    } else {
        libm::erf(x) / x
    }
}

/// Smoothed bulk inter-path potential, −(GM²/R)·erf(√π γ R / (2L₀)).
pub fn v_slow(r: f64, mass: f64, geometry: &MirrorGeometry, gamma: f64) -> f64 {
    let k = PI.sqrt() * gamma / (2.0 * geometry.thickness);
    -G * mass * mass * k * erf_over_x(k * r)
}

/// Short-range spike potential, −(GMm/R)·erf(R / (√2 ξ₀)).
pub fn v_spike(r: f64, mass: f64, ion_mass: f64, xi0: f64) -> f64 {
    let k = 1.0 / (std::f64::consts::SQRT_2 * xi0);
    -G * mass * ion_mass * k * erf_over_x(k * r)
}

/// Characteristic spike well depth GMm/ξ₀. The exact value at contact,
/// `|v_spike(0)|`, is √(2/π) times this.
pub fn spike_depth(mass: f64, ion_mass: f64, xi0: f64) -> f64 {
    G * mass * ion_mass / xi0
}

/// `|v_slow(0)|` = GM²γ/L₀.
pub fn slow_depth(mass: f64, geometry: &MirrorGeometry, gamma: f64) -> f64 {
    G * mass * mass * gamma / geometry.thickness
}

/// ω_B = (π γ³ G ρ₀ / 6)^{1/2}; independent of the body's size.
pub fn bulk_frequency(material: &MaterialSpec, gamma: f64) -> Result<f64> {
    material.validate()?;
    if !(gamma > 0.0) {
        return Err(Error::param("gamma", "must be positive"));
    }
    Ok((PI * gamma.powi(3) * G * material.density / 6.0).sqrt())
}

/// ω_sp = (√(2/π)·G m / (3ξ₀³))^{1/2}, used as the Schrödinger–Newton frequency.
pub fn spike_frequency(material: &MaterialSpec, xi0: f64) -> Result<f64> {
    material.validate()?;
    if !(xi0 > 0.0) {
        return Err(Error::param("xi0", "must be positive"));
    }
    Ok(((2.0 / PI).sqrt() * G * material.ionic_mass / (3.0 * xi0.powi(3))).sqrt())
}

/// τ_R = Q/ω_SN.
pub fn relaxation_time(q_factor: f64, omega_sn: f64) -> Result<f64> {
    if !(q_factor >= 1.0) {
        return Err(Error::param("q_factor", format!("must be ≥ 1, got {q_factor}")));
    }
    if !(omega_sn > 0.0) {
        return Err(Error::param("omega_sn", "must be positive"));
    }
    Ok(q_factor / omega_sn)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    pub xi0: f64,
    pub omega_sn: f64,
    pub omega_b: f64,
    pub gamma: f64,
    pub gamma_std_error: f64,
    /// GMm/ξ₀, J.
    pub v_spike_depth: f64,
    /// GM²γ/L₀, J.
    pub v_slow_depth: f64,
    pub tau_r: f64,
    /// Mirror mass ρ₀V₀, kg.
    pub mass: f64,
}

pub fn derive_scales(
    material: &MaterialSpec,
    geometry: &MirrorGeometry,
    temperature: f64,
    q_factor: f64,
    gamma_pairs: u64,
    stream: RngStream,
) -> Result<DerivedScales> {
    let xi = xi0(material, temperature)?;
    let gamma = shape_gamma(geometry, gamma_pairs, stream);
    let omega_sn = spike_frequency(material, xi)?;
    let mass = geometry.mass(material);
    Ok(DerivedScales {
        xi0: xi,
        omega_sn,
        omega_b: bulk_frequency(material, gamma.value)?,
        gamma: gamma.value,
        gamma_std_error: gamma.std_error,
        v_spike_depth: spike_depth(mass, material.ionic_mass, xi),
        v_slow_depth: slow_depth(mass, geometry, gamma.value),
        tau_r: relaxation_time(q_factor, omega_sn)?,
        mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::adaptive_simpson;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn xi0_at_zero_temperature_is_closed_form() {
        for m in [MaterialSpec::silica(), MaterialSpec::tungsten()] {
            let want = 1.5 * HBAR / (m.ionic_mass * m.debye_energy).sqrt();
            assert!(rel(xi0(&m, 0.0).unwrap(), want) < 1e-15);
        }
    }

    #[test]
    fn bose_integral_matches_quadrature() {
        for x in [1e-4, 0.3, 1.0, 1.99, 2.0, 2.01, 5.0, 40.0] {
            let oracle = adaptive_simpson(|u| if u == 0.0 { 1.0 } else { u / u.exp_m1() }, 0.0, x, 1e-14);
            assert!((bose_integral(x) - oracle).abs() < 1e-12 * oracle.max(1e-300), "x={x}");
        }
    }

    #[test]
    fn xi0_high_temperature_expansion() {
        let m = MaterialSpec::silica();
        let theta = m.debye_energy;
        let t = 100.0 * theta / K_B;
        let xi = xi0(&m, t).unwrap();
        let kt = K_B * t;
        let expansion = 9.0 * HBAR * HBAR / m.ionic_mass * (0.25 / theta + kt / (theta * theta));
        assert!(rel(xi * xi, expansion) < 0.01);

        // quadrature oracle of the Debye integral in energy units
        let integral = adaptive_simpson(|e| if e == 0.0 { kt } else { e / (e / kt).exp_m1() }, 0.0, theta, 1e-16 * kt * theta);
        let quad = 9.0 * HBAR * HBAR / m.ionic_mass * (0.25 / theta + integral / theta.powi(3));
        assert!(rel(xi * xi, quad) < 1e-9);
    }

    #[test]
    fn xi0_nondecreasing_in_temperature() {
        let m = MaterialSpec::tungsten();
        let mut prev = 0.0;
        for i in 0..200 {
            let v = xi0(&m, i as f64 * 5.0).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn silica_zero_point_length_value() {
        // Debye model with mean SiO₂ ion mass and Θ_D = 470 K
        let v = xi0(&MaterialSpec::silica(), 0.0).unwrap();
        assert!((v - 1.0762e-11).abs() < 1e-14, "{v:e}");
    }

    #[test]
    fn invalid_material_is_rejected() {
        assert!(MaterialSpec::new("bad", 1.0, 0.0, 1.0, 1.0).is_err());
        assert!(MaterialSpec::new("bad", 1.0, 1.0, -1.0, 1.0).is_err());
        let mut m = MaterialSpec::silica();
        m.debye_energy = 0.0;
        assert!(matches!(xi0(&m, 1.0), Err(Error::InvalidMaterial(_))));
        assert!(xi0(&MaterialSpec::silica(), -1.0).is_err());
    }

    #[test]
    fn potentials_limits_and_continuity() {
        let geo = MirrorGeometry::new(0.175, 0.16).unwrap();
        let mass = 40.0;
        let m = 30.0 * AMU;
        let xi = 4e-13;
        let far = 1.0;
        assert!(rel(v_slow(1e3, mass, &geo, 1.8), -G * mass * mass / 1e3) < 1e-12);
        assert!(rel(v_spike(far, mass, m, xi), -G * mass * m / far) < 1e-12);

        let at0 = v_spike(0.0, mass, m, xi);
        assert!(rel(-at0, G * mass * m * (2.0 / PI).sqrt() / xi) < 1e-15);
        // series/erf switchover is seamless
        let k = 1.0 / (std::f64::consts::SQRT_2 * xi);
        let r_switch = 1e-3 / k;
        let below = v_spike(r_switch * (1.0 - 1e-9), mass, m, xi);
        let above = v_spike(r_switch * (1.0 + 1e-9), mass, m, xi);
        assert!(rel(below, above) < 1e-12);
    }

    #[test]
    fn potentials_monotone_and_flat_at_origin() {
        let geo = MirrorGeometry::new(0.175, 0.16).unwrap();
        let xi = 4e-13;
        let m = 30.0 * AMU;
        let mut prev = v_spike(0.0, 40.0, m, xi);
        for i in 1..2000 {
            let v = v_spike(i as f64 * 1e-15, 40.0, m, xi);
            assert!(v > prev);
            prev = v;
        }
        let mut prev = v_slow(0.0, 40.0, &geo, 1.8);
        for i in 1..2000 {
            let v = v_slow(i as f64 * 1e-3, 40.0, &geo, 1.8);
            assert!(v > prev);
            prev = v;
        }
        // C¹ at 0: one-sided slope vanishes
        let h = 1e-6 * xi;
        let slope = (v_spike(h, 40.0, m, xi) - v_spike(0.0, 40.0, m, xi)) / h;
        assert!(slope.abs() * xi < 1e-5 * v_spike(0.0, 40.0, m, xi).abs());
    }

    #[test]
    fn spike_depth_benchmark() {
        let depth = spike_depth(40.0, 30.0 * AMU, 4e-13);
        let kelvin = depth / K_B;
        assert!((kelvin - 24.0).abs() < 0.05 * 24.0, "{kelvin}");
        let ev = depth / crate::constants::EV;
        assert!(rel(ev, 20.8e-4) < 0.01, "{ev}");
    }

    #[test]
    fn frequency_scalings() {
        let m = MaterialSpec::silica();
        let w = spike_frequency(&m, 1e-12).unwrap();
        assert!(rel(spike_frequency(&m, 4e-12).unwrap(), w / 8.0) < 1e-14);
        let wb = bulk_frequency(&m, 1.8).unwrap();
        let mut dense = m.clone();
        dense.density *= 4.0;
        assert!(rel(bulk_frequency(&dense, 1.8).unwrap(), 2.0 * wb) < 1e-14);
        let direct = (PI * 1.8f64.powi(3) * G * m.density / 6.0).sqrt();
        assert_eq!(wb, direct);
    }

    #[test]
    fn spike_frequency_benchmark() {
        let mut m = MaterialSpec::silica();
        m.ionic_mass = 30.0 * AMU;
        let w = spike_frequency(&m, 4e-13).unwrap();
        // direct evaluation, frozen
        assert!(rel(w, 3.7165) < 1e-3, "{w}");
        let hz = w / (2.0 * PI);
        assert!(hz / 0.37 < 2.0 && hz / 0.37 > 0.5);
    }

    #[test]
    fn relaxation_time_examples() {
        assert_eq!(relaxation_time(2.0, 0.5).unwrap(), 4.0);
        let years = relaxation_time(1e8, 0.37).unwrap() / (365.25 * 86_400.0);
        assert!(years > 1.0 && years < 100.0, "{years}");
        let one = relaxation_time(1.0, 0.37).unwrap();
        assert!(one > 1.0 && one < 10.0);
        assert!(relaxation_time(0.5, 1.0).is_err());
        assert!(relaxation_time(10.0, 0.0).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(MirrorGeometry::new(0.0, 1.0).is_err());
        assert!(MirrorGeometry::new(1.0, f64::NAN).is_err());
        let g = MirrorGeometry::new(0.175, 0.16).unwrap();
        assert!(rel(g.volume(), PI * 0.175 * 0.175 * 0.16) < 1e-15);
    }
}
