use std::f64::consts::PI;

use crate::channels::Channel;
use crate::qmath::{
    dephase_matrix, embed_matrix, trace_product, CMatrix, DensityMatrix, MeasurementOperator,
    Operator, PureState, RegisterLayout, Tensor, C64, VALIDATION_TOL,
};
use crate::{Error, Result};

use super::spec::{FirstVerifierAction, ProtocolSpec, Rounds};
use super::strategy::ProverStrategy;

/// Conditioning events below this probability are rejected.
pub(crate) const CONDITIONING_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sender {
    Prover,
    Verifier,
}

/// One message as it crossed the channel.
#[derive(Clone, Debug, PartialEq)]
pub struct MessageRecord {
    pub sender: Sender,
    pub classical: bool,
    /// Computational-basis distribution of `M` at transmission.
    pub distribution: Vec<(String, f64)>,
}

#[derive(Clone, Debug)]
pub struct Transcript {
    pub messages: Vec<MessageRecord>,
    /// Joint state of `P ⊗ M ⊗ V` after V2.
    pub final_state: DensityMatrix,
    pub accept_probability: f64,
}

/// One step of the interleaved channel sequence.
#[derive(Clone, Debug)]
pub(crate) enum Step {
    /// Kraus operators acting on the registers of `on`, in that order.
    Ops { on: RegisterLayout, ops: Vec<CMatrix> },
    Dephase(Vec<String>),
}

/// Unnormalized joint operator being pushed through the interaction.
#[derive(Clone, Debug)]
pub(crate) struct Joint {
    pub layout: RegisterLayout,
    pub rho: CMatrix,
}

impl Joint {
    pub fn zero_state(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        let mut rho = CMatrix::zeros(n, n);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        Self { layout, rho }
    }

    pub fn run(&mut self, steps: &[Step]) -> Result<()> {
        steps.iter().try_for_each(|s| self.step(s))
    }

    pub fn step(&mut self, step: &Step) -> Result<()> {
        match step {
            Step::Ops { on, ops } => {
                let pos = self.layout.positions(on.names())?;
                let n = self.layout.total_dim();
                let mut out = CMatrix::zeros(n, n);
                for k in ops {
                    let e = embed_matrix(k, &self.layout, &pos);
                    out += &e * &self.rho * e.adjoint();
                }
                self.rho = out;
            }
            Step::Dephase(labels) => {
                let pos = self.layout.positions(labels)?;
                self.rho = dephase_matrix(&self.rho, &self.layout, &pos);
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn normalize(&mut self) {
        let t = self.trace();
        self.rho /= C64::from(t);
    }

    pub fn expectation(&self, e: &MeasurementOperator) -> Result<f64> {
        let pos = self.layout.positions(e.layout().names())?;
        let full = embed_matrix(e.matrix(), &self.layout, &pos);
        Ok(trace_product(&full, &self.rho).re)
    }

    /// Diagonal of the marginal on `registers` in the computational basis.
    pub fn distribution(&self, registers: &RegisterLayout) -> Result<Vec<(String, f64)>> {
        let pos = self.layout.positions(registers.names())?;
        let idx = self.layout.sub_indices(&pos);
        let mut probs = vec![0.0; registers.total_dim()];
        for (i, &k) in idx.iter().enumerate() {
            probs[k] += self.rho[(i, i)].re;
        }
        Ok(registers.basis_labels().into_iter().zip(probs).collect())
    }

    pub fn into_density(self) -> DensityMatrix {
        let h = (&self.rho + self.rho.adjoint()) * C64::from(0.5);
        DensityMatrix::from_operator_unchecked(Operator::from_parts(self.layout, h))
    }
}

/// Either the coherent public-coin verifier (the default pipeline) or the
/// verifier conditioned on a fixed coin value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CoinMode {
    Coherent,
    Fixed(usize),
}

/// Prover turns compiled to steps on `P ⊗ M`.
#[derive(Clone, Debug)]
pub(crate) struct CompiledProver {
    pub workspace: RegisterLayout,
    pub first: Option<Vec<Step>>,
    pub second: Vec<Step>,
}

/// Steps for "prepare `psi` on `M` regardless of its contents".
pub(crate) fn prepare_steps(psi: &PureState) -> Step {
    let d = psi.dim();
    let ops = (0..d)
        .map(|j| {
            let mut k = CMatrix::zeros(d, d);
            k.set_column(j, psi.amplitudes());
            k
        })
        .collect();
    Step::Ops {
        on: psi.layout().clone(),
        ops,
    }
}

/// Square Kraus operators on `in_layout` (= S ∪ M) for a map into `message`
/// that leaves every register outside `message` in `|0⟩`.
pub(crate) fn lift_to_square(
    ops: &[CMatrix],
    in_layout: &RegisterLayout,
    message: &RegisterLayout,
) -> Vec<CMatrix> {
    let din = in_layout.total_dim();
    let dm = message.total_dim();
    let mut r = CMatrix::zeros(din, dm);
    for m in 0..dm {
        let md = message.digits(m);
        let digits: Vec<usize> = in_layout
            .names()
            .iter()
            .map(|name| match message.position(name) {
                Ok(p) => md[p],
                Err(_) => 0,
            })
            .collect();
        r[(in_layout.compose(&digits), m)] = C64::new(1.0, 0.0);
    }
    ops.iter().map(|k| &r * k).collect()
}

fn check_local(
    ch: &crate::channels::KrausChannel,
    allowed: &RegisterLayout,
    what: &str,
) -> Result<Step> {
    if ch.in_layout() != ch.out_layout() || !allowed.covers(ch.in_layout()) {
        return Err(Error::ShapeMismatch(format!(
            "{what} maps {} to {}; expected registers of {allowed} mapped to themselves",
            ch.in_layout(),
            ch.out_layout()
        )));
    }
    Ok(Step::Ops {
        on: ch.in_layout().clone(),
        ops: ch.ops().to_vec(),
    })
}

fn need_rounds(spec: &ProtocolSpec, rounds: Rounds, what: &str) -> Result<()> {
    if spec.rounds() != rounds {
        return Err(Error::ShapeMismatch(format!(
            "{what} provers need a {}-message protocol",
            rounds.messages()
        )));
    }
    Ok(())
}

fn check_message(spec: &ProtocolSpec, layout: &RegisterLayout, what: &str) -> Result<()> {
    if layout != spec.message() {
        return Err(Error::ShapeMismatch(format!(
            "{what} is on {layout} but the message register is {}",
            spec.message()
        )));
    }
    Ok(())
}

pub(crate) fn compile(spec: &ProtocolSpec, prover: &ProverStrategy) -> Result<CompiledProver> {
    let workspace = prover.workspace();
    let pm = workspace.concat(spec.message())?;
    pm.concat(spec.workspace())?;
    match prover {
        ProverStrategy::Entangled { p1, p2, .. } => {
            let first = match (spec.rounds(), p1) {
                (Rounds::Three, Some(p1)) => Some(vec![check_local(p1, &pm, "P1")?]),
                (Rounds::Two, None) => None,
                (Rounds::Three, None) => {
                    return Err(Error::ShapeMismatch("3-message protocol needs a first prover turn".into()))
                }
                (Rounds::Two, Some(_)) => {
                    return Err(Error::ShapeMismatch("2-message protocol has no first prover turn".into()))
                }
            };
            let second = vec![check_local(p2, &pm, "P2")?];
            Ok(CompiledProver { workspace, first, second })
        }
        ProverStrategy::UnentangledRaw(raw) => {
            need_rounds(spec, Rounds::Three, "general unentangled")?;
            check_message(spec, raw.message(), "φ1 output")?;
            let phi = |eb: &crate::channels::EbChannel| -> Result<Step> {
                Ok(Step::Ops {
                    on: eb.in_layout().clone(),
                    ops: lift_to_square(&eb.kraus(), eb.in_layout(), spec.message()),
                })
            };
            Ok(CompiledProver {
                workspace,
                first: Some(vec![check_local(raw.lambda1(), &pm, "λ1")?, phi(raw.phi1())?]),
                second: vec![check_local(raw.lambda2(), &pm, "λ2")?, phi(raw.phi2())?],
            })
        }
        ProverStrategy::Canonical(c) => {
            need_rounds(spec, Rounds::Three, "canonical")?;
            check_message(spec, c.psi().layout(), "first message")?;
            Ok(CompiledProver {
                workspace,
                first: Some(vec![prepare_steps(c.psi())]),
                second: vec![Step::Ops {
                    on: spec.message().clone(),
                    ops: c.response().kraus(),
                }],
            })
        }
        ProverStrategy::ClassicalResponse(c) => {
            if !spec.challenge_classical() {
                return Err(Error::Classicality(
                    "a classical response map needs a challenge declared classical".into(),
                ));
            }
            let first = match (spec.rounds(), c.psi()) {
                (Rounds::Three, Some(psi)) => {
                    check_message(spec, psi.layout(), "first message")?;
                    Some(vec![prepare_steps(psi)])
                }
                (Rounds::Two, None) => None,
                (Rounds::Three, None) => {
                    return Err(Error::ShapeMismatch("3-message protocol needs a first message".into()))
                }
                (Rounds::Two, Some(_)) => {
                    return Err(Error::ShapeMismatch("2-message protocol has no first message".into()))
                }
            };
            let g = c.response_indices(spec.message())?;
            let eb = crate::channels::EbChannel::classical_response(
                spec.message().clone(),
                spec.message().clone(),
                &g,
            )?;
            Ok(CompiledProver {
                workspace,
                first,
                second: vec![Step::Ops {
                    on: spec.message().clone(),
                    ops: eb.kraus(),
                }],
            })
        }
    }
}

/// Layout `M ⊗ store ⊗ coin` on which the public-coin verifier acts.
fn coin_layout(spec: &ProtocolSpec, store: &str, coin: &str) -> Result<RegisterLayout> {
    spec.message().concat(&spec.workspace().select(&[store, coin])?)
}

/// |m, s, c⟩ ↦ D^{-1/2} Σ_k ω^{ck} |s + k, m, k⟩: store the message, draw a
/// coherent uniform coin and add it into the cleared message register.
fn coherent_coin(d: usize) -> CMatrix {
    let n = d * d * d;
    let mut u = CMatrix::zeros(n, n);
    let amp = 1.0 / (d as f64).sqrt();
    for m in 0..d {
        for s in 0..d {
            for c in 0..d {
                let col = (m * d + s) * d + c;
                for k in 0..d {
                    let row = (((s + k) % d) * d + m) * d + k;
                    let phase = 2.0 * PI * ((c * k) % d) as f64 / d as f64;
                    u[(row, col)] = C64::from_polar(amp, phase);
                }
            }
        }
    }
    u
}

/// |m, s, c⟩ ↦ |s + y, m, c + y⟩: the public-coin verifier with coin `y`.
pub(crate) fn fixed_coin(d: usize, y: usize) -> CMatrix {
    let n = d * d * d;
    let mut u = CMatrix::zeros(n, n);
    for m in 0..d {
        for s in 0..d {
            for c in 0..d {
                let col = (m * d + s) * d + c;
                let row = (((s + y) % d) * d + m) * d + (c + y) % d;
                u[(row, col)] = C64::new(1.0, 0.0);
            }
        }
    }
    u
}

pub(crate) fn verifier_first(spec: &ProtocolSpec, mode: CoinMode) -> Result<Vec<Step>> {
    let mut steps = match spec.v1() {
        FirstVerifierAction::Channel(ch) => vec![Step::Ops {
            on: ch.in_layout().clone(),
            ops: ch.ops().to_vec(),
        }],
        FirstVerifierAction::PublicCoin { store, coin } => {
            let d = spec.message().total_dim();
            let u = match mode {
                CoinMode::Coherent => coherent_coin(d),
                CoinMode::Fixed(y) => fixed_coin(d, y),
            };
            vec![Step::Ops {
                on: coin_layout(spec, store, coin)?,
                ops: vec![u],
            }]
        }
    };
    if spec.challenge_classical() {
        steps.push(Step::Dephase(spec.message().names().to_vec()));
    }
    Ok(steps)
}

pub(crate) fn verifier_second(spec: &ProtocolSpec) -> Step {
    Step::Ops {
        on: spec.v2().in_layout().clone(),
        ops: spec.v2().ops().to_vec(),
    }
}

fn message_dephase(spec: &ProtocolSpec) -> Step {
    Step::Dephase(spec.message().names().to_vec())
}

pub(crate) fn clamp_probability(p: f64, what: &str) -> Result<f64> {
    if !(-VALIDATION_TOL..=1.0 + VALIDATION_TOL).contains(&p) {
        return Err(Error::Contract(format!("{what} {p} lies outside [0, 1]")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Runs the first message (if any) from the all-zero state.
pub(crate) fn first_half(
    spec: &ProtocolSpec,
    compiled: &CompiledProver,
    records: &mut Vec<MessageRecord>,
) -> Result<Joint> {
    let layout = compiled
        .workspace
        .concat(spec.message())?
        .concat(spec.workspace())?;
    let mut joint = Joint::zero_state(layout);
    if let Some(first) = &compiled.first {
        joint.run(first)?;
        if spec.first_message_classical() {
            joint.step(&message_dephase(spec))?;
        }
        records.push(MessageRecord {
            sender: Sender::Prover,
            classical: spec.first_message_classical(),
            distribution: joint.distribution(spec.message())?,
        });
    }
    Ok(joint)
}

/// Runs V1, the prover's second turn, V2 and the accept measurement.
pub(crate) fn second_half(
    spec: &ProtocolSpec,
    mut joint: Joint,
    second: &[Step],
    mode: CoinMode,
    records: &mut Vec<MessageRecord>,
) -> Result<(Joint, f64)> {
    joint.run(&verifier_first(spec, mode)?)?;
    records.push(MessageRecord {
        sender: Sender::Verifier,
        classical: spec.challenge_classical(),
        distribution: joint.distribution(spec.message())?,
    });
    joint.run(second)?;
    if spec.response_classical() {
        joint.step(&message_dephase(spec))?;
    }
    records.push(MessageRecord {
        sender: Sender::Prover,
        classical: spec.response_classical(),
        distribution: joint.distribution(spec.message())?,
    });
    joint.step(&verifier_second(spec))?;
    let p = joint.expectation(spec.accept())?;
    Ok((joint, p))
}

fn run(spec: &ProtocolSpec, prover: &ProverStrategy, mode: CoinMode) -> Result<Transcript> {
    let compiled = compile(spec, prover)?;
    let mut messages = Vec::with_capacity(spec.rounds().messages());
    let joint = first_half(spec, &compiled, &mut messages)?;
    let (joint, p) = second_half(spec, joint, &compiled.second, mode, &mut messages)?;
    Ok(Transcript {
        messages,
        final_state: joint.into_density(),
        accept_probability: clamp_probability(p, "acceptance probability")?,
    })
}

/// Full simulation of the interaction with message records.
pub fn simulate(spec: &ProtocolSpec, prover: &ProverStrategy) -> Result<Transcript> {
    run(spec, prover, CoinMode::Coherent)
}

/// Exact probability that the verifier accepts.
pub fn acceptance_probability(spec: &ProtocolSpec, prover: &ProverStrategy) -> Result<f64> {
    Ok(simulate(spec, prover)?.accept_probability)
}

/// Acceptance of a public-coin protocol as the uniform average over coin
/// values of the verifier conditioned on each coin.
pub fn acceptance_by_coin_mixture(spec: &ProtocolSpec, prover: &ProverStrategy) -> Result<f64> {
    if !spec.is_public_coin() {
        return Err(Error::Contract("coin mixture needs a public-coin protocol".into()));
    }
    let d = spec.message().total_dim();
    let mut total = 0.0;
    for y in 0..d {
        total += run(spec, prover, CoinMode::Fixed(y))?.accept_probability;
    }
    clamp_probability(total / d as f64, "acceptance probability")
}

fn require_qcip2(spec: &ProtocolSpec) -> Result<()> {
    if spec.rounds() != Rounds::Two || !spec.challenge_classical() || !spec.response_classical() {
        return Err(Error::Contract(
            "postselection needs a 2-message protocol with both messages classical".into(),
        ));
    }
    Ok(())
}

/// Distribution of the verifier's challenge in a 2-message protocol.
pub fn challenge_distribution(spec: &ProtocolSpec) -> Result<Vec<(String, f64)>> {
    if spec.rounds() != Rounds::Two {
        return Err(Error::Contract(
            "the challenge distribution of a 3-message protocol depends on the prover".into(),
        ));
    }
    let mut joint = Joint::zero_state(spec.verifier_layout());
    joint.run(&verifier_first(spec, CoinMode::Coherent)?)?;
    joint.distribution(spec.message())
}

/// Acceptance probability conditioned on the verifier sending challenge `y`
/// and the prover replying `z`.
pub fn postselected_acceptance(spec: &ProtocolSpec, y: &str, z: &str) -> Result<f64> {
    require_qcip2(spec)?;
    let message = spec.message();
    let yi = message.basis_index(y)?;
    let zi = message.basis_index(z)?;
    let mut joint = Joint::zero_state(spec.verifier_layout());
    joint.run(&verifier_first(spec, CoinMode::Coherent)?)?;
    let py = MeasurementOperator::projector(&PureState::basis(message.clone(), yi)?);
    let prob = joint.expectation(&py)?;
    if prob < CONDITIONING_FLOOR {
        return Err(Error::Conditioning {
            message: y.to_string(),
            probability: prob,
        });
    }
    // Keep the (M = y) block: V's conditional state is that block divided by Pr[y].
    let dm = message.total_dim();
    let dv = spec.workspace().total_dim();
    let mut rho_v = CMatrix::zeros(dv, dv);
    for a in 0..dv {
        for b in 0..dv {
            rho_v[(a, b)] = joint.rho[(yi * dv + a, yi * dv + b)] / C64::from(prob);
        }
    }
    let zeta = PureState::basis(message.clone(), zi)?.projector();
    let v_part = Operator::new(spec.workspace().clone(), rho_v)?;
    let start = zeta.tensor(&v_part)?;
    debug_assert_eq!(start.dim(), dm * dv);
    let mut joint = Joint {
        layout: start.layout().clone(),
        rho: start.into_matrix(),
    };
    joint.step(&verifier_second(spec))?;
    clamp_probability(joint.expectation(spec.accept())?, "conditional acceptance")
}
