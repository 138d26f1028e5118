use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use super::{regime_ok, zero_photon_amplitude, CwlParams};
use crate::error::Result;
use crate::numeric::{extrapolate_limit, LimitFit};
use crate::prediction::{Diagnostics, Theory, TheoryPrediction};
use crate::pulse::PulseProtocol;

/// Replica counts used by the finite-N diagnostic: 8, 16, …, 1024.
pub const DIAGNOSTIC_REPLICAS: [u32; 8] = [8, 16, 32, 64, 128, 256, 512, 1024];

/// `lim |K₀|^{2/N} = ε⁴((2n+1)π/(4e))²`.
pub fn preprobability_zero(eps2: f64, n_rot: u32) -> f64 {
    let f = f64::from(2 * n_rot + 1) * PI / (4.0 * E);
    eps2 * eps2 * f * f
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteNDiagnostic {
    /// `(N, ln|K₀|^{2/N})`.
    pub samples: Vec<(f64, f64)>,
    pub fit: LimitFit,
    /// exp of the fitted intercept.
    pub extrapolated: f64,
    pub closed_form: f64,
    pub relative_residual: f64,
}

/// Fit `ln|K₀(N)|^{2/N}` on {1, 1/N, ln N/N} and compare the extrapolated
/// preprobability with the closed-form limit. `None` when ε = 0, where every
/// finite-N amplitude vanishes.
pub fn finite_n_diagnostic(eps2: f64, n_rot: u32) -> Result<Option<FiniteNDiagnostic>> {
    if eps2 == 0.0 {
        return Ok(None);
    }
    let samples = DIAGNOSTIC_REPLICAS
        .iter()
        .map(|&n| zero_photon_amplitude(n, eps2, n_rot, 0.0, 0.0).map(|k| (f64::from(n), 2.0 / f64::from(n) * k.ln_abs)))
        .collect::<Result<Vec<_>>>()?;
    let fit = extrapolate_limit(&samples)?;
    let extrapolated = fit.limit.exp();
    let closed_form = preprobability_zero(eps2, n_rot);
    Ok(Some(FiniteNDiagnostic {
        samples,
        fit,
        extrapolated,
        closed_form,
        relative_residual: (extrapolated - closed_form).abs() / closed_form,
    }))
}

/// P0 = ε⁴((2n+1)π/(4e))², P1 = 1 − P0.
///
/// The one-photon preprobability tends to 1, so normalising changes P0 only
/// at O(P0²); the closed-form preprobability is reported directly.
pub fn cwl_probabilities(params: &CwlParams, protocol: &PulseProtocol, finite_n_check: bool) -> Result<TheoryPrediction> {
    let eps2 = params.eps2();
    let p0 = preprobability_zero(eps2, protocol.n);
    let regime = regime_ok(protocol, params);
    let mut diagnostics = Diagnostics { regime_ok: regime, eps2, ..Default::default() };
    if !regime {
        diagnostics.notes.push(format!(
            "pulse sequence too long for the perturbative CWL result: eps2*Omega*(2tp+T) = {:.3e}",
            eps2 * params.omega() * protocol.total_duration()
        ));
    }
    if finite_n_check {
        if let Some(d) = finite_n_diagnostic(eps2, protocol.n)? {
            diagnostics.extrapolation_residual = Some(d.relative_residual);
        }
    }
    Ok(TheoryPrediction { theory: Theory::Cwl, p0, p1: 1.0 - p0, diagnostics })
}
