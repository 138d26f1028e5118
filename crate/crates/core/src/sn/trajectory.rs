//! Conditional-Gaussian trajectories under continuous position measurement.
//!
//! Per step of length dt, with dW ~ N(0, dt) from the trajectory's stream:
//!
//! * means: the drift is the ω_m oscillator, advanced by its exact flow, and
//!   the measurement kick (√2αV_xx, √2αV_xp)·dW is added with the covariance
//!   at the start of the step;
//! * record: y = α⟨x⟩ + dW/(√2 dt), using the same dW;
//! * covariance: one classical RK4 step of the Riccati equations.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{covariance_riccati_rhs, ConditionalGaussianState, SnParams};
use crate::error::{Error, Result};
use crate::numeric::RngStream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub y: Vec<f64>,
    pub dt: f64,
    pub seed: u64,
    pub stream_index: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// `steps + 1` states, starting with the initial one.
    pub states: Vec<ConditionalGaussianState>,
    pub times: Vec<f64>,
    pub record: MeasurementRecord,
}

/// Step with Ω·dt = 10⁻³.
pub fn default_dt(params: &SnParams) -> f64 {
    1e-3 / params.omega()
}

fn check_step(params: &SnParams, initial: &ConditionalGaussianState, dt: f64) -> Result<()> {
    params.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    let rate = params.omega().max(params.alpha * params.alpha * initial.vxx.abs());
    if dt * rate > 0.1 {
        return Err(Error::param("dt", format!("dt·max(Ω, α²V_xx) = {:.3e} exceeds 0.1", dt * rate)));
    }
    if !(initial.vxx > 0.0 && initial.vpp > 0.0) {
        return Err(Error::param("initial", "variances must be positive"));
    }
    Ok(())
}

fn rk4_covariance(v: [f64; 3], params: &SnParams, dt: f64) -> [f64; 3] {
    let add = |a: [f64; 3], b: [f64; 3], h: f64| [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]];
    let k1 = covariance_riccati_rhs(v, params);
    let k2 = covariance_riccati_rhs(add(v, k1, 0.5 * dt), params);
    let k3 = covariance_riccati_rhs(add(v, k2, 0.5 * dt), params);
    let k4 = covariance_riccati_rhs(add(v, k3, dt), params);
    [0, 1, 2].map(|i| v[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Drive the stepper, handing every new state and record value to `visit`.
fn run<F>(params: &SnParams, initial: ConditionalGaussianState, dt: f64, steps: usize, stream: RngStream, mut visit: F) -> Result<ConditionalGaussianState>
where
    F: FnMut(usize, &ConditionalGaussianState, f64),
{
    check_step(params, &initial, dt)?;
    let m = params.mass;
    let w = params.omega_m;
    let (sin, cos) = (w * dt).sin_cos();
    let kick = std::f64::consts::SQRT_2 * params.alpha;
    let sqrt_dt = dt.sqrt();
    let mut rng = stream.rng();
    let mut s = initial;
    for step in 0..steps {
        let z: f64 = rng.sample(StandardNormal);
        let dw = z * sqrt_dt;
        let y = params.alpha * s.mean_x + dw / (std::f64::consts::SQRT_2 * dt);

        let x = s.mean_x * cos + s.mean_p / (m * w) * sin;
        let p = s.mean_p * cos - s.mean_x * m * w * sin;
        let v = rk4_covariance(s.covariance(), params, dt);
        let next = ConditionalGaussianState {
            mean_x: x + kick * s.vxx * dw,
            mean_p: p + kick * s.vxp * dw,
            vxx: v[0],
            vxp: v[1],
            vpp: v[2],
        };
        if !(next.vxx > 0.0 && next.vpp > 0.0 && next.determinant() > 0.0) || !next.mean_x.is_finite() || !next.mean_p.is_finite() {
            return Err(Error::Unstable {
                step: step + 1,
                reason: format!("covariance left the positive cone: ({:e}, {:e}, {:e})", next.vxx, next.vxp, next.vpp),
            });
        }
        s = next;
        visit(step + 1, &s, y);
    }
    Ok(s)
}

pub fn simulate_trajectory(
    params: &SnParams,
    initial: ConditionalGaussianState,
    dt: f64,
    steps: usize,
    stream: RngStream,
) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(steps + 1);
    let mut times = Vec::with_capacity(steps + 1);
    let mut y = Vec::with_capacity(steps);
    states.push(initial);
    times.push(0.0);
    run(params, initial, dt, steps, stream, |k, s, yk| {
        states.push(*s);
        times.push(k as f64 * dt);
        y.push(yk);
    })?;
    Ok(Trajectory { states, times, record: MeasurementRecord { y, dt, seed: stream.seed, stream_index: stream.index } })
}

/// Final state only, without storing the path.
pub fn simulate_final(
    params: &SnParams,
    initial: ConditionalGaussianState,
    dt: f64,
    steps: usize,
    stream: RngStream,
) -> Result<ConditionalGaussianState> {
    run(params, initial, dt, steps, stream, |_, _, _| {})
}

/// Final states of `count` trajectories; trajectory k uses stream index k.
/// Results are in index order whatever the thread count.
pub fn simulate_ensemble(
    params: &SnParams,
    initial: ConditionalGaussianState,
    dt: f64,
    steps: usize,
    seed: u64,
    count: usize,
) -> Result<Vec<ConditionalGaussianState>> {
    (0..count)
        .into_par_iter()
        .map(|k| simulate_final(params, initial, dt, steps, RngStream::with_index(seed, k as u64)))
        .collect()
}
