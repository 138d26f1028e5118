//! Pulse protocols: the coupling g(t), its integral φ(t), and the
//! CWL-corrected pulse strength Φ(t).
//!
//! Segment boundaries are closed on both sides: at an instant where two
//! segments touch, the earlier segment's value is returned.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One constant-coupling interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub coupling: f64,
}

/// Piecewise-constant coupling starting at t = 0, zero after the last segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingSchedule {
    segments: Vec<Segment>,
}

impl CouplingSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        for s in &segments {
            if !(s.duration >= 0.0 && s.duration.is_finite()) || !s.coupling.is_finite() {
                return Err(Error::param("segments", format!("invalid segment {s:?}")));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Start times of every segment plus the end time.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut t = 0.0;
        out.push(t);
        for s in &self.segments {
            t += s.duration;
            out.push(t);
        }
        out
    }

    pub fn coupling(&self, t: f64) -> f64 {
        let mut start = 0.0;
        for s in &self.segments {
            let end = start + s.duration;
            if s.duration > 0.0 && t >= start && t <= end {
                return s.coupling;
            }
            start = end;
        }
        0.0
    }

    /// φ(t) = ∫₀ᵗ g, evaluated segment by segment.
    pub fn phase(&self, t: f64) -> f64 {
        let mut start = 0.0;
        let mut acc = 0.0;
        for s in &self.segments {
            if t <= start {
                break;
            }
            let covered = (t - start).min(s.duration);
            acc += covered * s.coupling;
            start += s.duration;
        }
        acc
    }

    /// ∫₀ᵗ |g|.
    pub fn abs_phase(&self, t: f64) -> f64 {
        let mut start = 0.0;
        let mut acc = 0.0;
        for s in &self.segments {
            if t <= start {
                break;
            }
            acc += (t - start).min(s.duration) * s.coupling.abs();
            start += s.duration;
        }
        acc
    }
}

/// Two equal rectangular pulses separated by a free wait.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseProtocol {
    pub n: u32,
    pub t_p: f64,
    pub t_wait: f64,
}

impl PulseProtocol {
    pub fn new(n: u32, t_p: f64, t_wait: f64) -> Result<Self> {
        if !(t_p > 0.0 && t_p.is_finite()) {
            return Err(Error::param("t_p", format!("must be positive, got {t_p}")));
        }
        if !(t_wait >= 0.0 && t_wait.is_finite()) {
            return Err(Error::param("t_wait", format!("must be non-negative, got {t_wait}")));
        }
        Ok(Self { n, t_p, t_wait })
    }

    /// g₀ = (2n+1)π/(2t_p), so each pulse rotates by (n+½)π.
    pub fn g0(&self) -> f64 {
        (2 * self.n + 1) as f64 * PI / (2.0 * self.t_p)
    }

    /// End of the second pulse, 2t_p + T.
    pub fn total_duration(&self) -> f64 {
        2.0 * self.t_p + self.t_wait
    }

    pub fn schedule(&self) -> CouplingSchedule {
        let g = self.g0();
        CouplingSchedule {
            segments: vec![
                Segment { duration: self.t_p, coupling: g },
                Segment { duration: self.t_wait, coupling: 0.0 },
                Segment { duration: self.t_p, coupling: g },
            ],
        }
    }

    pub fn coupling(&self, t: f64) -> f64 {
        let g = self.g0();
        let second = self.t_p + self.t_wait;
        if (0.0..=self.t_p).contains(&t) || (second..=second + self.t_p).contains(&t) {
            g
        } else {
            0.0
        }
    }

    pub fn phase(&self, t: f64) -> f64 {
        let g = self.g0();
        let second = self.t_p + self.t_wait;
        let first = t.clamp(0.0, self.t_p);
        let later = (t - second).clamp(0.0, self.t_p);
        g * (first + later)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratedPulse {
    /// Φ(t) = (1 + ε²/2)·|φ(t)|.
    pub value: f64,
    /// ε²Ω(2t_p + T) ≤ 0.1·Φ(2t_p + T).
    pub regime_ok: bool,
}

pub fn cwl_integrated_pulse(protocol: &PulseProtocol, eps2: f64, omega: f64, t: f64) -> IntegratedPulse {
    let factor = 1.0 + 0.5 * eps2;
    let total = protocol.total_duration();
    let full = factor * protocol.phase(total);
    IntegratedPulse {
        value: factor * protocol.phase(t).abs(),
        regime_ok: eps2 * omega * total <= 0.1 * full,
    }
}
