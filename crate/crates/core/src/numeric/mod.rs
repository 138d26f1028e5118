//! Shared numerical kernels. Each kernel is deterministic given its inputs and
//! an explicit [`RngStream`]; none touch global state.

pub mod extrapolate;
pub mod gamma;
pub mod mc;
pub mod ode;
pub mod quad;
pub mod rng;

pub use extrapolate::{extrapolate_limit, LimitFit};
pub use gamma::{ln_factorial, ln_upper_incomplete_gamma, upper_incomplete_gamma};
pub use mc::{mc_integrate, McEstimate};
pub use ode::{integrate, rk4_step, OdeProblem, OdeSolution, OdeState};
pub use quad::adaptive_simpson;
pub use rng::RngStream;
