//! Classical RK4 with step-doubling (Richardson) error control.
//!
//! Each trial step of size `h` is taken once as a full step and once as two
//! half steps. Their difference divided by 15 estimates the local error of the
//! half-step result; accepted steps keep the Richardson-extrapolated value.

use num_complex::Complex64;

use crate::error::{Error, Result};

// unlike f64::max, lets NaN through so blow-ups are noticed
fn nan_max(m: f64, v: f64) -> f64 {
    if v.is_nan() || v > m {
        v
    } else {
        m
    }
}

/// Vector-space operations the stepper needs from a state.
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
    /// Largest component magnitude.
    fn max_abs(&self) -> f64;
    /// Largest component magnitude of `self - other`.
    fn max_abs_diff(&self, other: &Self) -> f64;
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }

    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, v| nan_max(m, v.abs()))
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter().zip(other).fold(0.0, |m, (a, b)| nan_max(m, (a - b).abs()))
    }
}

impl OdeState for Vec<Complex64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += v * a;
        }
    }

    fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, v| nan_max(m, v.norm()))
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter().zip(other).fold(0.0, |m, (a, b)| nan_max(m, (a - b).norm()))
    }
}

/// An initial-value problem `y' = rhs(t, y)` on `[t0, t1]`.
///
/// `tolerance` bounds the estimated local error per step, scaled by
/// `max(1, |y|∞)`.
pub struct OdeProblem<S, F> {
    pub rhs: F,
    pub t0: f64,
    pub t1: f64,
    pub y0: S,
    pub tolerance: f64,
    /// First trial step; defaults to `(t1 - t0) / 64`.
    pub initial_step: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct OdeSolution<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub rejected: usize,
}

impl<S> OdeSolution<S> {
    pub fn last(&self) -> &S {
        self.states.last().expect("solution always holds the initial state")
    }
}

pub fn rk4_step<S, F>(rhs: &F, t: f64, y: &S, h: f64) -> S
where
    S: OdeState,
    F: Fn(f64, &S) -> S,
{
    let k1 = rhs(t, y);
    let mut y2 = y.clone();
    y2.axpy(0.5 * h, &k1);
    let k2 = rhs(t + 0.5 * h, &y2);
    let mut y3 = y.clone();
    y3.axpy(0.5 * h, &k2);
    let k3 = rhs(t + 0.5 * h, &y3);
    let mut y4 = y.clone();
    y4.axpy(h, &k3);
    let k4 = rhs(t + h, &y4);

    let mut out = y.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    out
}

pub fn integrate<S, F>(problem: OdeProblem<S, F>) -> Result<OdeSolution<S>>
where
    S: OdeState,
    F: Fn(f64, &S) -> S,
{
    let OdeProblem { rhs, t0, t1, y0, tolerance, initial_step } = problem;
    if !(tolerance > 0.0) {
        return Err(Error::param("tolerance", "must be positive"));
    }
    let span = t1 - t0;
    let mut times = vec![t0];
    let mut states = vec![y0.clone()];
    if span == 0.0 {
        return Ok(OdeSolution { times, states, rejected: 0 });
    }
    if span < 0.0 {
        return Err(Error::param("t1", "must not precede t0"));
    }

    let min_step = span * 1e-13;
    let mut h = initial_step.unwrap_or(span / 64.0).min(span);
    let mut t = t0;
    let mut y = y0;
    let mut rejected = 0;

    while t < t1 {
        let last = t + h >= t1;
        let step = if last { t1 - t } else { h };

        let full = rk4_step(&rhs, t, &y, step);
        let half = rk4_step(&rhs, t, &y, 0.5 * step);
        let mut fine = rk4_step(&rhs, t + 0.5 * step, &half, 0.5 * step);

        let err = fine.max_abs_diff(&full) / 15.0;
        let scale = fine.max_abs().max(1.0);
        if !err.is_finite() {
            return Err(Error::Integration { t, reason: "non-finite state".into() });
        }

        if err <= tolerance * scale {
            // Richardson: y_fine + (y_fine - y_full) / 15
            let mut correction = fine.clone();
            correction.axpy(-1.0, &full);
            fine.axpy(1.0 / 15.0, &correction);
            t = if last { t1 } else { t + step };
            y = fine;
            times.push(t);
            states.push(y.clone());

            let grow = if err == 0.0 { 2.0 } else { 0.9 * (tolerance * scale / err).powf(0.2) };
            h = step * grow.clamp(0.2, 2.0);
            if last {
                break;
            }
        } else {
            rejected += 1;
            h = 0.5 * step;
            if h < min_step {
                return Err(Error::Integration { t, reason: format!("step size underflow (h = {h:e})") });
            }
        }
    }

    Ok(OdeSolution { times, states, rejected })
}
