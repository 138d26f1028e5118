use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theory {
    #[serde(rename = "QM")]
    Qm,
    #[serde(rename = "SN")]
    Sn,
    #[serde(rename = "CWL")]
    Cwl,
}

impl Theory {
    pub fn label(self) -> &'static str {
        match self {
            Theory::Qm => "QM",
            Theory::Sn => "SN",
            Theory::Cwl => "CWL",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// All validity conditions of the engine's approximations hold.
    pub regime_ok: bool,
    pub eps2: f64,
    pub lambda: Option<f64>,
    /// Thermal zero-phonon probability, reported beside P0 and never added to it.
    pub p0_thermal: Option<f64>,
    pub thermal_regime_ok: Option<bool>,
    /// Relative deviation of the finite-N extrapolated preprobability from
    /// the closed form.
    pub extrapolation_residual: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoryPrediction {
    pub theory: Theory,
    pub p0: f64,
    pub p1: f64,
    pub diagnostics: Diagnostics,
}

impl TheoryPrediction {
    /// Standard quantum mechanics: the two-pulse sequence returns the photon
    /// with certainty.
    pub fn quantum() -> Self {
        Self { theory: Theory::Qm, p0: 0.0, p1: 1.0, diagnostics: Diagnostics { regime_ok: true, ..Default::default() } }
    }
}
