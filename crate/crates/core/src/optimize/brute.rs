use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::protocol::{acceptance_probability, ClassicalResponseProver, ProtocolSpec, Rounds};
use crate::qmath::{CVector, PureState, RegisterLayout, C64};
use crate::{Error, Result};

use super::{Method, OptimizerConfig, ValueReport, Witness};

/// Probe points per net point when estimating the covering radius.
const PROBE_FACTOR: usize = 8;

fn bloch_point(i: usize, n: usize) -> [f64; 3] {
    let golden = PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - (2 * i + 1) as f64 / n as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = golden * i as f64;
    [r * phi.cos(), r * phi.sin(), z]
}

/// Point `i` of the `n`-point Fibonacci net on the Bloch sphere as a qubit state.
pub fn fibonacci_state(i: usize, n: usize, layout: &RegisterLayout) -> Result<PureState> {
    let [x, y, z] = bloch_point(i, n);
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    let amps = CVector::from_vec(vec![
        C64::from((theta / 2.0).cos()),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]);
    PureState::new(layout.clone(), amps)
}

/// Largest Bloch angle from `q` to the net, found by scanning outward from
/// the net points of nearest height (the net is sorted by height).
fn nearest_angle(q: [f64; 3], n: usize) -> f64 {
    let start = (((1.0 - q[2]) * n as f64 - 1.0) / 2.0).round().clamp(0.0, (n - 1) as f64) as usize;
    let mut best_cos = -1.0f64;
    let chord = |c: f64| (2.0 - 2.0 * c).max(0.0).sqrt();
    let visit = |j: usize, best_cos: &mut f64| -> bool {
        let p = bloch_point(j, n);
        if (p[2] - q[2]).abs() > chord(*best_cos) {
            return false;
        }
        *best_cos = best_cos.max(p[0] * q[0] + p[1] * q[1] + p[2] * q[2]);
        true
    };
    for j in start..n {
        if !visit(j, &mut best_cos) {
            break;
        }
    }
    for j in (0..start).rev() {
        if !visit(j, &mut best_cos) {
            break;
        }
    }
    best_cos.clamp(-1.0, 1.0).acos()
}

/// Estimated bound on |⟨ψ|A|ψ⟩ − ⟨φ|A|φ⟩| between any qubit state and its
/// nearest net point, for every effect 0 ≤ A ≤ I.
///
/// The covering radius θ of the net is estimated on a denser Fibonacci
/// probe set and inflated by the probe set's own covering radius, which
/// scales as θ·√(n / n_probe). The trace distance of pure states at Bloch
/// angle θ is sin(θ/2), and effect expectations are 1-Lipschitz in it.
pub(crate) fn net_error(n: usize) -> f64 {
    let probes = n * PROBE_FACTOR;
    let theta = (0..probes)
        .into_par_iter()
        .map(|i| nearest_angle(bloch_point(i, probes), n))
        .reduce(|| 0.0, f64::max);
    let inflated = theta * (1.0 + (1.0 / PROBE_FACTOR as f64).sqrt());
    (inflated / 2.0).min(PI / 2.0).sin()
}

fn response_maps(d: usize) -> Vec<Vec<usize>> {
    let mut maps = vec![Vec::new()];
    for _ in 0..d {
        maps = maps
            .into_iter()
            .flat_map(|g| (0..d).map(move |z| [g.as_slice(), &[z]].concat()))
            .collect();
    }
    maps
}

/// Best acceptance over canonical provers with deterministic answers: an
/// ε-net of pure first messages crossed with every response map, each pair
/// simulated exactly. The reported net error bounds the gap to the optimum
/// over all pure first messages.
pub fn brute_force_unentangled_value(spec: &ProtocolSpec, cfg: &OptimizerConfig) -> Result<ValueReport> {
    cfg.validate()?;
    let message = spec.message();
    if message.total_dim() != 2 {
        return Err(Error::Unsupported(format!(
            "brute force needs a one-qubit message, got {message}"
        )));
    }
    if !spec.challenge_classical() {
        return Err(Error::Unsupported(
            "brute force enumerates deterministic answers to classical challenges".into(),
        ));
    }
    let maps = response_maps(message.total_dim());
    let points = match spec.rounds() {
        Rounds::Three => cfg.net_resolution,
        Rounds::Two => 1,
    };
    let tasks: Vec<(usize, usize)> = (0..maps.len())
        .flat_map(|g| (0..points).map(move |i| (g, i)))
        .collect();
    let values = tasks
        .par_iter()
        .map(|&(g, i)| {
            let psi = match spec.rounds() {
                Rounds::Three => Some(fibonacci_state(i, points, message)?),
                Rounds::Two => None,
            };
            let prover = ClassicalResponseProver::from_indices(psi, message, &maps[g])?;
            acceptance_probability(spec, &prover.into())
        })
        .collect::<Result<Vec<f64>>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (k, v)| if *v > values[b] { k } else { b });
    let (g, i) = tasks[best];
    let psi = match spec.rounds() {
        Rounds::Three => Some(fibonacci_state(i, points, message)?),
        Rounds::Two => None,
    };
    let net = match spec.rounds() {
        Rounds::Three => net_error(points),
        Rounds::Two => 0.0,
    };
    Ok(ValueReport {
        value: values[best],
        witness: Witness::ClassicalResponse {
            psi,
            responses: maps[g].clone(),
        },
        iterates: vec![vec![values[best]]],
        method: Method::BruteForce,
        net_error: Some(net),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NexpDecision {
    pub threshold: f64,
    pub value: f64,
    pub net_error: f64,
    pub verdict: Verdict,
}

/// Accepts iff the brute-force unentangled value reaches (c + s)/2; the net
/// must be fine enough that its error stays below (c − s)/4.
pub fn nexp_decide(spec: &ProtocolSpec, c: f64, s: f64, cfg: &OptimizerConfig) -> Result<NexpDecision> {
    if !(0.0..=1.0).contains(&c) || !(0.0..=1.0).contains(&s) || c <= s {
        return Err(Error::Validation(format!(
            "need 0 ≤ s < c ≤ 1, got c = {c}, s = {s}"
        )));
    }
    let report = brute_force_unentangled_value(spec, cfg)?;
    let net_error = report.net_error.unwrap_or(0.0);
    let required = (c - s) / 4.0;
    if net_error >= required {
        return Err(Error::InsufficientResolution { net_error, required });
    }
    let threshold = (c + s) / 2.0;
    Ok(NexpDecision {
        threshold,
        value: report.value,
        net_error,
        verdict: if report.value >= threshold {
            Verdict::Accept
        } else {
            Verdict::Reject
        },
    })
}
