use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ConfigOverrides, ExperimentConfig};
use crate::cwl::{cwl_probabilities, CwlParams};
use crate::error::{Error, Result};
use crate::physcore::{spike_frequency, xi0};
use crate::prediction::{Theory, TheoryPrediction};
use crate::pulse::PulseProtocol;
use crate::sn::{feasibility, sn_prediction, sn_pulse_p0, thermal_p0, Feasibility, SnParams, ThermalEstimate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OmegaSnSource {
    /// Spike frequency of the configured material at the configured temperature.
    Material,
    Override,
}

/// Resolved parameters of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    pub omega_m: f64,
    pub omega_sn: f64,
    pub omega_sn_source: OmegaSnSource,
    pub omega: f64,
    pub eps2: f64,
    pub omega_cav: f64,
    /// Red detuning used by the QM branch, −ω_m.
    pub detuning_qm: f64,
    /// Red detuning used by the gravitational branches, −Ω.
    pub detuning_gravity: f64,
    pub g0: f64,
    pub q_factor: f64,
    pub temperature: f64,
    pub pulse: PulseProtocol,
    pub material: String,
}

pub fn resolve(config: &ExperimentConfig) -> Result<ExperimentParams> {
    let e = &config.experiment;
    let (omega_sn, source) = match e.omega_sn_override {
        Some(w) => (w, OmegaSnSource::Override),
        None => (spike_frequency(&config.material, xi0(&config.material, e.temperature)?)?, OmegaSnSource::Material),
    };
    let omega = e.omega_m.hypot(omega_sn);
    Ok(ExperimentParams {
        omega_m: e.omega_m,
        omega_sn,
        omega_sn_source: source,
        omega,
        eps2: omega_sn * omega_sn / (2.0 * omega * omega),
        omega_cav: e.omega_cav,
        detuning_qm: -e.omega_m,
        detuning_gravity: -omega,
        g0: config.pulse.g0(),
        q_factor: e.q_factor,
        temperature: e.temperature,
        pulse: config.pulse,
        material: config.material.name.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub params: ExperimentParams,
    /// QM, SN, CWL in that order.
    pub predictions: [TheoryPrediction; 3],
    /// Exact two-pulse SN composition, reported beside the leading-order p0.
    pub sn_p0_exact: f64,
    pub thermal: ThermalEstimate,
    pub feasibility: Option<Feasibility>,
    pub warnings: Vec<String>,
}

impl Comparison {
    pub fn prediction(&self, theory: Theory) -> &TheoryPrediction {
        self.predictions.iter().find(|p| p.theory == theory).expect("all theories present")
    }

    /// The SN and CWL validity conditions both hold.
    pub fn regime_ok(&self) -> bool {
        self.predictions.iter().all(|p| p.diagnostics.regime_ok)
    }
}

pub fn run_comparison(config: &ExperimentConfig) -> Result<Comparison> {
    let params = resolve(config)?;
    let pulse = config.pulse;
    let mut warnings = vec![];
    if params.eps2 >= 0.25 {
        warnings.push(format!("eps2 = {:.3} >= 0.25: leading-order results unreliable", params.eps2));
    }

    let thermal = thermal_p0(params.omega_m, params.q_factor, params.temperature, pulse.t_p)?;
    if !thermal.regime_ok {
        warnings.push(format!("thermal occupation rate k_BT/(hbar omega_m Q) = {:.3e} exceeds 1", thermal.occupation_rate));
    }

    let sn_params = SnParams { hbar: 1.0, mass: 1.0, omega_m: params.omega_m, omega_sn: params.omega_sn, alpha: 0.0, g0: pulse.g0() };
    let mut sn = sn_prediction(&sn_params, pulse.n, pulse.t_wait)?;
    let sn_p0_exact = sn_pulse_p0(&sn_params, pulse.n, pulse.t_wait)?.p0_exact;
    let cwl_params = CwlParams::new(params.omega_m, params.omega_sn)?;
    let mut cwl = cwl_probabilities(&cwl_params, &pulse, true)?;
    for p in [&mut sn, &mut cwl] {
        p.diagnostics.p0_thermal = Some(thermal.p0_th);
        p.diagnostics.thermal_regime_ok = Some(thermal.regime_ok);
    }

    if cfg!(debug_assertions) {
        let free_cwl = cwl_probabilities(&CwlParams::new(params.omega_m, 0.0)?, &pulse, false)?;
        let free_sn = sn_prediction(&SnParams { omega_sn: 0.0, ..sn_params }, pulse.n, pulse.t_wait)?;
        let qm = TheoryPrediction::quantum();
        debug_assert_eq!((free_cwl.p0, free_cwl.p1), (qm.p0, qm.p1));
        debug_assert_eq!((free_sn.p0, free_sn.p1), (qm.p0, qm.p1));
    }

    let feasibility = if params.omega_sn > 0.0 { Some(feasibility(params.omega_sn, 1.0)?) } else { None };
    Ok(Comparison { params, predictions: [TheoryPrediction::quantum(), sn, cwl], sn_p0_exact, thermal, feasibility, warnings })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    OmegaM,
    OmegaSn,
    N,
    Tp,
    Twait,
    Temperature,
    Q,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 7] =
        [SweepAxis::OmegaM, SweepAxis::OmegaSn, SweepAxis::N, SweepAxis::Tp, SweepAxis::Twait, SweepAxis::Temperature, SweepAxis::Q];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::OmegaM => "omega_m",
            SweepAxis::OmegaSn => "omega_sn",
            SweepAxis::N => "n",
            SweepAxis::Tp => "tp",
            SweepAxis::Twait => "Twait",
            SweepAxis::Temperature => "temperature",
            SweepAxis::Q => "Q",
        }
    }

    fn overrides(self, value: f64) -> Result<ConfigOverrides> {
        let mut o = ConfigOverrides::default();
        match self {
            SweepAxis::OmegaM => o.omega_m = Some(value),
            SweepAxis::OmegaSn => o.omega_sn = Some(value),
            SweepAxis::N => {
                if !(value >= 0.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX)) {
                    return Err(Error::param("n", format!("sweep values must be non-negative integers, got {value}")));
                }
                o.n = Some(value as u32);
            }
            SweepAxis::Tp => o.t_p = Some(value),
            SweepAxis::Twait => o.t_wait = Some(value),
            SweepAxis::Temperature => o.temperature = Some(value),
            SweepAxis::Q => o.q_factor = Some(value),
        }
        Ok(o)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let valid: Vec<&str> = SweepAxis::ALL.iter().map(|a| a.name()).collect();
            Error::Config { keys: vec![format!("axis={s}")], message: format!("unknown sweep axis; valid axes: {}", valid.join(", ")) }
        })
    }
}

/// `points` values from `from` to `to` inclusive, evenly spaced in value or
/// in logarithm.
pub fn grid(from: f64, to: f64, points: usize, log: bool) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(Error::param("points", "must be at least 1"));
    }
    if log && !(from > 0.0 && to > 0.0) {
        return Err(Error::param("from", "log grids need positive end points"));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let step = |i: usize| i as f64 / (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            if i == 0 {
                from
            } else if i == points - 1 {
                to
            } else if log {
                (from.ln() + step(i) * (to.ln() - from.ln())).exp()
            } else {
                from + step(i) * (to - from)
            }
        })
        .collect())
}

/// Run the comparison at every grid point of one axis, in parallel, and
/// return the results in grid order.
pub fn sweep(config: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<(f64, Comparison)>> {
    values
        .par_iter()
        .map(|&v| {
            let point = config.clone().with_overrides(&axis.overrides(v)?)?;
            Ok((v, run_comparison(&point)?))
        })
        .collect()
}
