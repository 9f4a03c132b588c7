use std::collections::BTreeMap;

use crate::channels::{Channel, EbChannel, KrausChannel};
use crate::qmath::{PureState, RegisterLayout};
use crate::{Error, Result};

/// Unentangled prover in general form: each turn applies an arbitrary
/// channel `λ_i` on the workspace and message, then the entanglement-breaking
/// channel `φ_i` from `S ∪ M` to `M`, after which `S` is reset to `|0⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawUnentangledProver {
    workspace: RegisterLayout,
    eb_registers: Vec<String>,
    lambda1: KrausChannel,
    phi1: EbChannel,
    lambda2: KrausChannel,
    phi2: EbChannel,
}

impl RawUnentangledProver {
    pub fn new(
        workspace: RegisterLayout,
        eb_registers: Vec<String>,
        lambda1: KrausChannel,
        phi1: EbChannel,
        lambda2: KrausChannel,
        phi2: EbChannel,
    ) -> Result<Self> {
        for label in &eb_registers {
            if !workspace.contains(label) {
                return Err(Error::ShapeMismatch(format!(
                    "register {label} of S is not in the prover workspace {workspace}"
                )));
            }
        }
        let message = phi1.out_layout().clone();
        if phi2.out_layout() != &message {
            return Err(Error::ShapeMismatch(format!(
                "φ1 outputs {message} but φ2 outputs {}",
                phi2.out_layout()
            )));
        }
        let s = workspace.select(&eb_registers)?;
        let s_m = s.concat(&message)?;
        for (name, phi) in [("φ1", &phi1), ("φ2", &phi2)] {
            if !phi.in_layout().same_registers(&s_m) || phi.in_layout().dims() != s_m.select(phi.in_layout().names())?.dims() {
                return Err(Error::ShapeMismatch(format!(
                    "{name} acts on {} but S ∪ M is {s_m}",
                    phi.in_layout()
                )));
            }
        }
        let p_m = workspace.concat(&message)?;
        for (name, lambda) in [("λ1", &lambda1), ("λ2", &lambda2)] {
            if lambda.in_layout() != lambda.out_layout() || !p_m.covers(lambda.in_layout()) {
                return Err(Error::ShapeMismatch(format!(
                    "{name} must map registers of {p_m} to themselves, got {} → {}",
                    lambda.in_layout(),
                    lambda.out_layout()
                )));
            }
        }
        Ok(Self {
            workspace,
            eb_registers,
            lambda1,
            phi1,
            lambda2,
            phi2,
        })
    }

    pub fn workspace(&self) -> &RegisterLayout {
        &self.workspace
    }

    pub fn eb_registers(&self) -> &[String] {
        &self.eb_registers
    }

    pub fn message(&self) -> &RegisterLayout {
        self.phi1.out_layout()
    }

    pub fn lambda1(&self) -> &KrausChannel {
        &self.lambda1
    }

    pub fn phi1(&self) -> &EbChannel {
        &self.phi1
    }

    pub fn lambda2(&self) -> &KrausChannel {
        &self.lambda2
    }

    pub fn phi2(&self) -> &EbChannel {
        &self.phi2
    }
}

/// Prover that sends a pure state and answers through a measure-and-prepare
/// channel on `M`, using no workspace.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalProver {
    psi: PureState,
    response: EbChannel,
}

impl CanonicalProver {
    pub fn new(psi: PureState, response: EbChannel) -> Result<Self> {
        if response.in_layout() != psi.layout() || response.out_layout() != psi.layout() {
            return Err(Error::ShapeMismatch(format!(
                "response channel {} → {} does not act on the message {}",
                response.in_layout(),
                response.out_layout(),
                psi.layout()
            )));
        }
        Ok(Self { psi, response })
    }

    pub fn psi(&self) -> &PureState {
        &self.psi
    }

    pub fn response(&self) -> &EbChannel {
        &self.response
    }
}

/// Prover answering each classical challenge string with a fixed response
/// string. `psi` is the first message and is absent for 2-message protocols.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalResponseProver {
    psi: Option<PureState>,
    responses: BTreeMap<String, String>,
}

impl ClassicalResponseProver {
    pub fn new(psi: Option<PureState>, responses: BTreeMap<String, String>) -> Self {
        Self { psi, responses }
    }

    /// Response map given as indices into the computational basis of `message`.
    pub fn from_indices(
        psi: Option<PureState>,
        message: &RegisterLayout,
        responses: &[usize],
    ) -> Result<Self> {
        if responses.len() != message.total_dim() {
            return Err(Error::Validation(format!(
                "{} responses for {} challenges",
                responses.len(),
                message.total_dim()
            )));
        }
        let labels = message.basis_labels();
        let mut map = BTreeMap::new();
        for (y, &z) in responses.iter().enumerate() {
            let z = labels.get(z).ok_or_else(|| {
                Error::Validation(format!("response index {z} outside the message alphabet"))
            })?;
            map.insert(labels[y].clone(), z.clone());
        }
        Ok(Self { psi, responses: map })
    }

    pub fn psi(&self) -> Option<&PureState> {
        self.psi.as_ref()
    }

    pub fn responses(&self) -> &BTreeMap<String, String> {
        &self.responses
    }

    /// Response indices in challenge order; fails unless the map is total
    /// over the alphabet of `message`.
    pub fn response_indices(&self, message: &RegisterLayout) -> Result<Vec<usize>> {
        let labels = message.basis_labels();
        labels
            .iter()
            .map(|y| {
                let z = self.responses.get(y).ok_or_else(|| {
                    Error::ShapeMismatch(format!("response map has no entry for challenge {y}"))
                })?;
                message.basis_index(z)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProverStrategy {
    /// Arbitrary channels on `P ⊗ M`; `p1` is absent for 2-message protocols.
    Entangled {
        workspace: RegisterLayout,
        p1: Option<KrausChannel>,
        p2: KrausChannel,
    },
    UnentangledRaw(RawUnentangledProver),
    Canonical(CanonicalProver),
    ClassicalResponse(ClassicalResponseProver),
}

impl ProverStrategy {
    pub fn kind(&self) -> &'static str {
        match self {
            ProverStrategy::Entangled { .. } => "entangled",
            ProverStrategy::UnentangledRaw(_) => "unentangled_raw",
            ProverStrategy::Canonical(_) => "canonical",
            ProverStrategy::ClassicalResponse(_) => "classical_response",
        }
    }

    pub fn workspace(&self) -> RegisterLayout {
        match self {
            ProverStrategy::Entangled { workspace, .. } => workspace.clone(),
            ProverStrategy::UnentangledRaw(raw) => raw.workspace().clone(),
            ProverStrategy::Canonical(_) | ProverStrategy::ClassicalResponse(_) => RegisterLayout::empty(),
        }
    }
}

impl From<RawUnentangledProver> for ProverStrategy {
    fn from(p: RawUnentangledProver) -> Self {
        ProverStrategy::UnentangledRaw(p)
    }
}

impl From<CanonicalProver> for ProverStrategy {
    fn from(p: CanonicalProver) -> Self {
        ProverStrategy::Canonical(p)
    }
}

impl From<ClassicalResponseProver> for ProverStrategy {
    fn from(p: ClassicalResponseProver) -> Self {
        ProverStrategy::ClassicalResponse(p)
    }
}
