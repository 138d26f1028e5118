//! Physical constants (CODATA 2018, SI).

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Newtonian gravitational constant, m³·kg⁻¹·s⁻².
pub const G: f64 = 6.674_30e-11;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Atomic mass unit, kg.
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Electron-volt, J.
pub const EV: f64 = 1.602_176_634e-19;
