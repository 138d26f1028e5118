//! Predictions for a pulsed cavity-optomechanics experiment under standard
//! quantum mechanics, Schrödinger–Newton (SN) semiclassical gravity, and
//! Correlated-Worldline (CWL) gravity.
//!
//! The crate is organised bottom-up:
//!
//! * [`numeric`]: ODE/SDE steppers, Monte Carlo quadrature, the complex upper
//!   incomplete gamma function and limit extrapolation.
//! * [`physcore`]: material and geometry physics (ξ₀(T), shape constant γ,
//!   inter-path potentials, ω_SN, ω_B, relaxation time).
//! * [`pulse`]: the two-rectangle coupling protocol and its phase calculus.
//! * [`cwl`]: replica dynamics, ground-state structure and Fock amplitudes.
//! * [`sn`]: conditional Gaussian states under continuous measurement and the
//!   SN pulse, thermal and feasibility results.
//! * [`harness`]: configuration, three-theory comparison, sweeps and output.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constants;
pub mod cwl;
pub mod error;
pub mod harness;
pub mod numeric;
pub mod physcore;
pub mod prediction;
pub mod pulse;
pub mod sn;

pub use error::{Error, Result};
pub use prediction::{Diagnostics, Theory, TheoryPrediction};
