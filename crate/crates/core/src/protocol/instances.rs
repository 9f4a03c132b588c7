//! Reference protocols and seeded random instances.

use rand::Rng;

use crate::channels::{EbChannel, KrausChannel};
use crate::qmath::{CMatrix, MeasurementOperator, Operator, PureState, RegisterLayout, C64};
use crate::random::{random_eb_channel, random_effect, random_kraus_channel, random_state};
use crate::Result;

use super::family::MeasurementFamily;
use super::spec::{FirstVerifierAction, ProtocolSpec, Rounds};
use super::strategy::{ProverStrategy, RawUnentangledProver};

pub const MESSAGE: &str = "M";
pub const STORE: &str = "store";
pub const COIN: &str = "coin";

fn qubit(label: &str) -> RegisterLayout {
    RegisterLayout::qubits(&[label]).expect("single label")
}

fn public_coin_workspace() -> RegisterLayout {
    RegisterLayout::qubits(&[STORE, COIN]).expect("distinct labels")
}

fn public_coin() -> FirstVerifierAction {
    FirstVerifierAction::PublicCoin {
        store: STORE.into(),
        coin: COIN.into(),
    }
}

/// M_{x,a} = ½(|a⟩⟨a| + H|a⊕x⟩⟨a⊕x|H): the verifier checks the stored
/// qubit in the Z or X basis with equal probability and accepts iff the
/// outcome b satisfies a ⊕ b = x·(basis bit).
fn chsh_effect(x: usize, a: usize) -> CMatrix {
    let h = 0.5f64.sqrt();
    let ket = |i: usize| -> [f64; 2] { if i == 0 { [1.0, 0.0] } else { [0.0, 1.0] } };
    let had = |i: usize| -> [f64; 2] { if i == 0 { [h, h] } else { [h, -h] } };
    let (u, v) = (ket(a), had(a ^ x));
    CMatrix::from_fn(2, 2, |i, j| C64::from(0.5 * (u[i] * u[j] + v[i] * v[j])))
}

/// The CHSH-derived family on one qubit.
pub fn chsh_family() -> MeasurementFamily {
    let layout = qubit(MESSAGE);
    let ops = (0..2)
        .map(|x| {
            (0..2)
                .map(|a| {
                    MeasurementOperator::from_matrix(layout.clone(), chsh_effect(x, a))
                        .expect("average of two projectors")
                })
                .collect()
        })
        .collect();
    let bits = vec!["0".to_string(), "1".to_string()];
    MeasurementFamily::new(layout, bits.clone(), bits, ops).expect("2 × 2 family")
}

/// Public-coin protocol whose acceptance operator for coin `y` and answer
/// `z` is `fam[y][z]` applied to the stored first message:
/// accept = Σ_{y,z} |z⟩⟨z|_M ⊗ M_{y,z}(store) ⊗ |y⟩⟨y|_coin.
///
/// Both alphabets must be the computational basis of the family's register.
pub fn family_protocol(fam: &MeasurementFamily, rounds: Rounds) -> Result<ProtocolSpec> {
    let m = fam.layout().clone();
    let d = m.total_dim();
    let labels = m.basis_labels();
    if fam.challenges() != labels.as_slice() || fam.responses() != labels.as_slice() {
        return Err(crate::Error::ShapeMismatch(
            "family alphabets must be the basis strings of its register".into(),
        ));
    }
    let workspace = RegisterLayout::new([(STORE, d), (COIN, d)])?;
    let layout = m.concat(&workspace)?;
    let mut acc = CMatrix::zeros(d * d * d, d * d * d);
    for y in 0..d {
        for z in 0..d {
            let e = fam.get(y, z).matrix();
            for s in 0..d {
                for t in 0..d {
                    acc[((z * d + s) * d + y, (z * d + t) * d + y)] = e[(s, t)];
                }
            }
        }
    }
    ProtocolSpec::new(
        m.clone(),
        workspace,
        rounds,
        public_coin(),
        KrausChannel::identity(m),
        MeasurementOperator::from_matrix(layout, acc)?,
        public_coin_flags(rounds),
    )
}

fn public_coin_flags(rounds: Rounds) -> Vec<bool> {
    match rounds {
        Rounds::Two => vec![true, true],
        Rounds::Three => vec![false, true, true],
    }
}

fn chsh_spec(rounds: Rounds) -> ProtocolSpec {
    family_protocol(&chsh_family(), rounds).expect("CHSH spec is well formed")
}

/// 3-message public-coin protocol: the prover sends a qubit, the verifier
/// sends a uniform bit x, the prover answers a bit a.
pub fn chsh_protocol() -> (ProtocolSpec, MeasurementFamily) {
    (chsh_spec(Rounds::Three), chsh_family())
}

/// 2-message variant with classical challenge and response in which the
/// stored qubit is the verifier's own |0⟩.
pub fn chsh_qcip2_protocol() -> ProtocolSpec {
    chsh_spec(Rounds::Two)
}

/// Public-coin protocol that accepts unconditionally.
pub fn always_accept_protocol(rounds: Rounds) -> ProtocolSpec {
    ProtocolSpec::new(
        qubit(MESSAGE),
        public_coin_workspace(),
        rounds,
        public_coin(),
        KrausChannel::identity(qubit(MESSAGE)),
        MeasurementOperator::identity(qubit(MESSAGE)),
        public_coin_flags(rounds),
    )
    .expect("trivial spec is well formed")
}

/// Random protocol on a one-qubit message and a two-qubit verifier space
/// with Kraus-rank-2 verifier channels.
pub fn random_protocol<R: Rng + ?Sized>(rng: &mut R, rounds: Rounds, classical: Vec<bool>) -> Result<ProtocolSpec> {
    let m = qubit(MESSAGE);
    let v = RegisterLayout::qubits(&["V0", "V1"])?;
    let mv = m.concat(&v)?;
    ProtocolSpec::new(
        m,
        v,
        rounds,
        FirstVerifierAction::Channel(random_kraus_channel(rng, &mv, &mv, 2)),
        random_kraus_channel(rng, &mv, &mv, 2),
        random_effect(rng, &mv),
        classical,
    )
}

/// Random public-coin protocol on a one-qubit message.
pub fn random_public_coin_protocol<R: Rng + ?Sized>(rng: &mut R, rounds: Rounds) -> Result<ProtocolSpec> {
    let m = qubit(MESSAGE);
    let v = public_coin_workspace();
    let mv = m.concat(&v)?;
    ProtocolSpec::new(
        m,
        v,
        rounds,
        public_coin(),
        random_kraus_channel(rng, &mv, &mv, 2),
        random_effect(rng, &mv),
        public_coin_flags(rounds),
    )
}

/// Random general unentangled prover with a two-qubit workspace whose first
/// qubit is the entanglement-breaking register.
pub fn random_raw_prover<R: Rng + ?Sized>(rng: &mut R, message: &RegisterLayout) -> Result<RawUnentangledProver> {
    let p = RegisterLayout::qubits(&["P0", "P1"])?;
    let pm = p.concat(message)?;
    let sm = p.select(&["P0"])?.concat(message)?;
    RawUnentangledProver::new(
        p,
        vec!["P0".into()],
        random_kraus_channel(rng, &pm, &pm, 2),
        random_eb_channel(rng, &sm, message, 2),
        random_kraus_channel(rng, &pm, &pm, 2),
        random_eb_channel(rng, &sm, message, 2),
    )
}

/// Random entangled prover with a one-qubit workspace.
pub fn random_entangled_prover<R: Rng + ?Sized>(
    rng: &mut R,
    message: &RegisterLayout,
    rounds: Rounds,
) -> Result<ProverStrategy> {
    let p = qubit("P");
    let pm = p.concat(message)?;
    let p1 = match rounds {
        Rounds::Three => Some(random_kraus_channel(rng, &pm, &pm, 2)),
        Rounds::Two => None,
    };
    Ok(ProverStrategy::Entangled {
        workspace: p,
        p1,
        p2: random_kraus_channel(rng, &pm, &pm, 2),
    })
}

/// Random canonical prover: Haar first message and a random
/// measure-and-prepare response.
pub fn random_canonical_prover<R: Rng + ?Sized>(
    rng: &mut R,
    message: &RegisterLayout,
    outcomes: usize,
) -> Result<super::strategy::CanonicalProver> {
    let psi: PureState = random_state(rng, message);
    let response: EbChannel = random_eb_channel(rng, message, message, outcomes);
    super::strategy::CanonicalProver::new(psi, response)
}

/// Diagonal effect with the given computational-basis entries.
pub fn diagonal_effect(layout: RegisterLayout, diag: &[f64]) -> Result<MeasurementOperator> {
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        diag.len(),
        diag.iter().map(|&x| C64::from(x)),
    ));
    MeasurementOperator::new(Operator::new(layout, m)?)
}

/// Family of independent random effects over the basis strings of `layout`.
pub fn random_family<R: Rng + ?Sized>(rng: &mut R, layout: &RegisterLayout) -> MeasurementFamily {
    let labels = layout.basis_labels();
    let ops = labels
        .iter()
        .map(|_| labels.iter().map(|_| random_effect(rng, layout)).collect())
        .collect();
    MeasurementFamily::new(layout.clone(), labels.clone(), labels, ops).expect("square family")
}
