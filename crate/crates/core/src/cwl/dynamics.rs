use num_complex::Complex64;

use super::{CwlParams, ReplicaEnsemble};
use crate::error::{Error, Result};
use crate::pulse::{cwl_integrated_pulse, PulseProtocol};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which coefficients of the mean-mode equations
/// `Ȧ = −igB`, `Ḃ = −ig·s·A − iΩk·B` to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MeanModel {
    /// (s, k) = (1 + ε², ε²): the replica equations expanded to first order in ε².
    #[default]
    LeadingOrder,
    /// (s, k) = (1, ε²)/(1 − ε²): the uniform-mode projection of the full
    /// P-matrix system, with no expansion.
    ExactProjector,
}

impl MeanModel {
    fn coefficients(self, eps2: f64) -> (f64, f64) {
        match self {
            MeanModel::LeadingOrder => (1.0 + eps2, eps2),
            MeanModel::ExactProjector => (1.0 / (1.0 - eps2), eps2 / (1.0 - eps2)),
        }
    }
}

type Mat2 = [[Complex64; 2]; 2];

/// Exact propagator over `dt` at constant coupling g.
///
/// With c = Ωk and w = √(c²/4 + g²s):
/// `U = e^{−ict/2} [[cos wt + i(c/2)S, −igS], [−igsS, cos wt − i(c/2)S]]`,
/// S = sin(wt)/w.
fn segment(g: f64, s: f64, c: f64, dt: f64) -> Mat2 {
    let w2 = 0.25 * c * c + g * g * s;
    let w = w2.sqrt();
    let wt = w * dt;
    let sinc_t = if wt.abs() < 1e-8 { dt * (1.0 - wt * wt / 6.0) } else { wt.sin() / w };
    let cos = Complex64::new(wt.cos(), 0.0);
    let phase = Complex64::from_polar(1.0, -0.5 * c * dt);
    [
        [phase * (cos + I * (0.5 * c * sinc_t)), phase * (-I * g * sinc_t)],
        [phase * (-I * g * s * sinc_t), phase * (cos - I * (0.5 * c * sinc_t))],
    ]
}

fn apply(m: &Mat2, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
    (m[0][0] * v.0 + m[0][1] * v.1, m[1][0] * v.0 + m[1][1] * v.1)
}

/// Mean photon and phonon amplitudes (A, B) at time t ≥ 0.
///
/// The coupling is piecewise constant, so the solution is the ordered product
/// of exact segment propagators; after the second pulse the modes evolve freely.
pub fn mean_mode_evolution(
    protocol: &PulseProtocol,
    params: &CwlParams,
    a0: Complex64,
    b0: Complex64,
    t: f64,
    model: MeanModel,
) -> (Complex64, Complex64) {
    let (s, k) = model.coefficients(params.eps2());
    let c = params.omega() * k;
    let mut state = (a0, b0);
    let mut start = 0.0;
    let segments = protocol.schedule();
    for seg in segments.segments() {
        if t <= start {
            return state;
        }
        let dt = (t - start).min(seg.duration);
        state = apply(&segment(seg.coupling, s, c, dt), state);
        start += seg.duration;
    }
    if t > start {
        state = apply(&segment(0.0, s, c, t - start), state);
    }
    state
}

/// Uncoupled Rabi rotation by φ.
fn rabi(a: Complex64, b: Complex64, phi: f64) -> (Complex64, Complex64) {
    let (sin, cos) = phi.sin_cos();
    (a * cos - I * b * sin, b * cos - I * a * sin)
}

/// Every replica at time t.
///
/// The CWL coupling acts only on the replica mean, so each replica is its
/// own Rabi rotation by the bare phase φ(t) plus the correction carried by
/// the mean: `x_j(t) = Rabi(x_j(0); φ) + [Mean(t) − Rabi(Mean(0); φ)]`.
pub fn replica_solution(
    protocol: &PulseProtocol,
    params: &CwlParams,
    initial: &ReplicaEnsemble,
    t: f64,
    model: MeanModel,
) -> ReplicaEnsemble {
    let a0 = initial.mean_a();
    let b0 = initial.mean_b();
    let phi = protocol.phase(t);
    let (am, bm) = mean_mode_evolution(protocol, params, a0, b0, t, model);
    let (ar, br) = rabi(a0, b0, phi);
    let (da, db) = (am - ar, bm - br);
    let (a, b) = initial
        .a
        .iter()
        .zip(&initial.b)
        .map(|(&aj, &bj)| {
            let (x, y) = rabi(aj, bj, phi);
            (x + da, y + db)
        })
        .unzip();
    ReplicaEnsemble { a, b }
}

/// Simplified state at the end of the second pulse for replicas that start
/// with photon amplitudes α_j and the mirror in its ground state:
/// `a_j = −α_j + iε²Ω(t_p + T)·ᾱ`, `b_j = iε²(2n+1)(π/4)·ᾱ`, ᾱ = N⁻¹Σα_j.
pub fn sequence_endpoint(protocol: &PulseProtocol, params: &CwlParams, alpha: &[Complex64]) -> Result<ReplicaEnsemble> {
    if alpha.is_empty() {
        return Err(Error::param("alpha", "need at least one replica"));
    }
    let eps2 = params.eps2();
    let mean = alpha.iter().sum::<Complex64>() / alpha.len() as f64;
    let shift = I * eps2 * params.omega() * (protocol.t_p + protocol.t_wait) * mean;
    let phonon = I * eps2 * (2 * protocol.n + 1) as f64 * std::f64::consts::FRAC_PI_4 * mean;
    Ok(ReplicaEnsemble { a: alpha.iter().map(|&x| -x + shift).collect(), b: vec![phonon; alpha.len()] })
}

/// Both validity conditions for the perturbative CWL treatment:
/// `ε²Ω(2t_p + T) ≤ 0.1` and the integrated-pulse dominance check.
pub fn regime_ok(protocol: &PulseProtocol, params: &CwlParams) -> bool {
    let eps2 = params.eps2();
    let omega = params.omega();
    let duration_ok = eps2 * omega * protocol.total_duration() <= 0.1;
    duration_ok && cwl_integrated_pulse(protocol, eps2, omega, protocol.total_duration()).regime_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cwl::ProjectorMatrix;
    use crate::numeric::{integrate, OdeProblem};
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// RK4 of the full system ȧ = −igb, Pḃ = −iga − iΩε²(𝟙𝟙/N)b, one
    /// segment at a time.
    fn full_system_oracle(protocol: &PulseProtocol, params: &CwlParams, init: &ReplicaEnsemble, t_end: f64) -> ReplicaEnsemble {
        let n = init.len();
        let eps2 = params.eps2();
        let omega = params.omega();
        let p = ProjectorMatrix::new(n, eps2).unwrap();
        let mut y: Vec<Complex64> = init.a.iter().chain(&init.b).copied().collect();
        let mut bounds = protocol.schedule().boundaries();
        bounds.retain(|&b| b < t_end);
        bounds.push(t_end);
        for w in bounds.windows(2) {
            let g = protocol.coupling(0.5 * (w[0] + w[1]));
            let rhs = |_t: f64, y: &Vec<Complex64>| {
                let (a, b) = y.split_at(n);
                let mean_b = b.iter().sum::<Complex64>() / n as f64;
                let force: Vec<Complex64> = (0..n).map(|j| -I * g * a[j] - I * omega * eps2 * mean_b).collect();
                let bdot = p.solve(&force);
                let mut out: Vec<Complex64> = b.iter().map(|&bj| -I * g * bj).collect();
                out.extend(bdot);
                out
            };
            y = integrate(OdeProblem { rhs, t0: w[0], t1: w[1], y0: y, tolerance: 1e-13, initial_step: None })
                .unwrap()
                .last()
                .clone();
        }
        ReplicaEnsemble { a: y[..n].to_vec(), b: y[n..].to_vec() }
    }

    fn max_diff(x: &ReplicaEnsemble, y: &ReplicaEnsemble) -> f64 {
        x.a.iter().chain(&x.b).zip(y.a.iter().chain(&y.b)).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
    }

    fn max_abs(x: &ReplicaEnsemble) -> f64 {
        x.a.iter().chain(&x.b).map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn random_ensemble(n: usize, seed: u64) -> ReplicaEnsemble {
        let mut rng = crate::numeric::RngStream::new(seed).rng();
        let mut draw = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let a = (0..n).map(|_| draw()).collect();
        let b = (0..n).map(|_| draw()).collect();
        ReplicaEnsemble { a, b }
    }

    #[test]
    fn rabi_limit_without_gravity() {
        let p = PulseProtocol::new(1, 0.7, 0.4).unwrap();
        let params = CwlParams::new(2.0, 0.0).unwrap();
        let (a0, b0) = (c(0.3, -0.2), c(-0.5, 0.9));
        for i in 0..50 {
            let t = i as f64 * 0.05;
            let (a, b) = mean_mode_evolution(&p, &params, a0, b0, t, MeanModel::LeadingOrder);
            let (ra, rb) = rabi(a0, b0, p.phase(t));
            assert!((a - ra).norm() < 1e-13 && (b - rb).norm() < 1e-13, "t={t}");
        }
        let zero = mean_mode_evolution(&p, &params, c(0.0, 0.0), c(0.0, 0.0), 1.0, MeanModel::LeadingOrder);
        assert_eq!(zero, (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn mean_mode_matches_ode_of_same_model() {
        let p = PulseProtocol::new(0, 0.25, 0.5).unwrap();
        let params = CwlParams::from_eps2(1.0, 0.01).unwrap();
        let (a0, b0) = (c(1.0, 0.0), c(0.0, 0.0));
        let (s, k) = MeanModel::LeadingOrder.coefficients(params.eps2());
        let omega = params.omega();
        let t_end = p.total_duration();
        let mut y = vec![a0, b0];
        let b = p.schedule().boundaries();
        for w in b.windows(2) {
            let g = p.coupling(0.5 * (w[0] + w[1]));
            let rhs = |_t: f64, y: &Vec<Complex64>| vec![-I * g * y[1], -I * g * s * y[0] - I * omega * k * y[1]];
            y = integrate(OdeProblem { rhs, t0: w[0], t1: w[1], y0: y, tolerance: 1e-13, initial_step: None })
                .unwrap()
                .last()
                .clone();
        }
        let (a, bb) = mean_mode_evolution(&p, &params, a0, b0, t_end, MeanModel::LeadingOrder);
        assert!((a - y[0]).norm() < 1e-10 && (bb - y[1]).norm() < 1e-10);
    }

    #[test]
    fn exact_projector_matches_full_system() {
        let p = PulseProtocol::new(0, 0.25, 0.5).unwrap();
        let params = CwlParams::from_eps2(1.0, 0.05).unwrap();
        let init = random_ensemble(4, 5);
        let t = p.total_duration() + 0.1;
        let oracle = full_system_oracle(&p, &params, &init, t);
        let closed = replica_solution(&p, &params, &init, t, MeanModel::ExactProjector);
        assert!(max_diff(&oracle, &closed) < 1e-10 * max_abs(&oracle));
    }

    #[test]
    fn leading_order_within_quartic_budget() {
        let p = PulseProtocol::new(0, 0.25, 0.5).unwrap();
        let eps2 = 0.02;
        let params = CwlParams::from_eps2(1.0, eps2).unwrap();
        for seed in 0..4 {
            let init = random_ensemble(3, seed);
            let oracle = full_system_oracle(&p, &params, &init, p.total_duration());
            let closed = replica_solution(&p, &params, &init, p.total_duration(), MeanModel::LeadingOrder);
            let rel = max_diff(&oracle, &closed) / max_abs(&oracle);
            assert!(rel <= 5.0 * eps2 * eps2, "seed {seed}: {rel:e}");
        }
    }

    #[test]
    fn replica_means_follow_mean_mode() {
        let p = PulseProtocol::new(1, 0.3, 0.2).unwrap();
        let params = CwlParams::from_eps2(1.0, 0.03).unwrap();
        let init = random_ensemble(6, 9);
        let out = replica_solution(&p, &params, &init, 0.9, MeanModel::LeadingOrder);
        let (a, b) = mean_mode_evolution(&p, &params, init.mean_a(), init.mean_b(), 0.9, MeanModel::LeadingOrder);
        assert!((out.mean_a() - a).norm() < 1e-14 && (out.mean_b() - b).norm() < 1e-14);
    }

    #[test]
    fn decoupled_replicas_without_gravity() {
        let p = PulseProtocol::new(0, 1.0, 1.0).unwrap();
        let params = CwlParams::new(1.0, 0.0).unwrap();
        let init = random_ensemble(5, 2);
        let out = replica_solution(&p, &params, &init, 1.7, MeanModel::LeadingOrder);
        for j in 0..5 {
            let (a, b) = rabi(init.a[j], init.b[j], p.phase(1.7));
            assert!((out.a[j] - a).norm() < 1e-14 && (out.b[j] - b).norm() < 1e-14);
        }
    }

    #[test]
    fn permutation_commutes_with_evolution() {
        let p = PulseProtocol::new(0, 0.4, 0.3).unwrap();
        let params = CwlParams::from_eps2(1.0, 0.04).unwrap();
        let init = random_ensemble(5, 3);
        let perm = [3, 0, 4, 1, 2];
        let t = 0.95;
        let lhs = replica_solution(&p, &params, &init.permuted(&perm), t, MeanModel::LeadingOrder);
        let rhs = replica_solution(&p, &params, &init, t, MeanModel::LeadingOrder).permuted(&perm);
        assert!(max_diff(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn endpoint_examples() {
        let p = PulseProtocol::new(0, 0.25, 0.5).unwrap();
        let alpha = vec![c(1.0, 0.5), c(-0.2, 0.1), c(0.3, 0.3)];
        let free = sequence_endpoint(&p, &CwlParams::new(1.0, 0.0).unwrap(), &alpha).unwrap();
        for j in 0..3 {
            assert_eq!(free.a[j], -alpha[j]);
            assert_eq!(free.b[j], c(0.0, 0.0));
        }
        let params = CwlParams::from_eps2(1.0, 0.02).unwrap();
        let uniform = vec![c(0.7, -0.1); 4];
        let e = sequence_endpoint(&p, &params, &uniform).unwrap();
        let want = I * 0.02 * std::f64::consts::PI / 4.0 * uniform[0];
        for b in &e.b {
            assert!((b - want).norm() < 1e-16);
        }
        assert!(sequence_endpoint(&p, &params, &[]).is_err());
    }

    #[test]
    fn endpoint_versus_dynamics() {
        // Photon components agree at O(ε²·ε²Ωt); the printed phonon component
        // is half of what the equations of motion produce.
        let p = PulseProtocol::new(0, 0.25, 0.5).unwrap();
        let eps2 = 0.01;
        let params = CwlParams::from_eps2(1.0, eps2).unwrap();
        let alpha = vec![c(1.0, 0.0), c(0.4, -0.3), c(-0.2, 0.6)];
        let init = ReplicaEnsemble::new(alpha.clone(), vec![c(0.0, 0.0); 3]).unwrap();
        let t = p.total_duration();
        let dynamic = replica_solution(&p, &params, &init, t, MeanModel::LeadingOrder);
        let endpoint = sequence_endpoint(&p, &params, &alpha).unwrap();
        let x = eps2 * params.omega() * t;
        let scale = init.mean_a().norm();
        for j in 0..3 {
            assert!((dynamic.a[j] - endpoint.a[j]).norm() < 2.0 * eps2 * (eps2 + x) * scale, "a[{j}]");
            let ratio = dynamic.b[j] / endpoint.b[j];
            assert!((ratio - 2.0).norm() < 0.05, "b ratio {ratio}");
        }
    }

    #[test]
    fn regime_flags() {
        let p = PulseProtocol::new(0, 0.25, 0.5).unwrap();
        assert!(regime_ok(&p, &CwlParams::from_eps2(1.0, 0.01).unwrap()));
        let long = PulseProtocol::new(0, 10.0, 100.0).unwrap();
        assert!(!regime_ok(&long, &CwlParams::from_eps2(1.0, 0.01).unwrap()));
    }
}
