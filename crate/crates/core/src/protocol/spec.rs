use serde::{Deserialize, Serialize};

use crate::channels::{Channel, KrausChannel};
use crate::qmath::{MeasurementOperator, RegisterLayout};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounds {
    /// V1, prover, V2.
    Two,
    /// P1, V1, P2, V2.
    Three,
}

impl Rounds {
    pub fn messages(self) -> usize {
        match self {
            Rounds::Two => 2,
            Rounds::Three => 3,
        }
    }
}

/// The verifier's first action.
#[derive(Clone, Debug, PartialEq)]
pub enum FirstVerifierAction {
    /// Arbitrary channel on registers of `M ∪ V`.
    Channel(KrausChannel),
    /// Move the incoming message into register `store` of `V`, sample a
    /// uniform coin over the basis of `M`, record it in register `coin` of
    /// `V` and copy it into `M`.
    PublicCoin { store: String, coin: String },
}

/// A 2- or 3-message verification procedure.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSpec {
    message: RegisterLayout,
    workspace: RegisterLayout,
    rounds: Rounds,
    v1: FirstVerifierAction,
    v2: KrausChannel,
    accept: MeasurementOperator,
    classical: Vec<bool>,
}

fn square_on(ch: &KrausChannel, allowed: &RegisterLayout, what: &str) -> Result<()> {
    if ch.in_layout() != ch.out_layout() {
        return Err(Error::ShapeMismatch(format!(
            "{what} maps {} to {}; expected a channel from a register set to itself",
            ch.in_layout(),
            ch.out_layout()
        )));
    }
    if !allowed.covers(ch.in_layout()) {
        return Err(Error::ShapeMismatch(format!(
            "{what} acts on {} outside {allowed}",
            ch.in_layout()
        )));
    }
    Ok(())
}

impl ProtocolSpec {
    /// `classical[k]` declares whether message `k` (in sending order) is
    /// measured in the computational basis before transmission.
    pub fn new(
        message: RegisterLayout,
        workspace: RegisterLayout,
        rounds: Rounds,
        v1: FirstVerifierAction,
        v2: KrausChannel,
        accept: MeasurementOperator,
        classical: Vec<bool>,
    ) -> Result<Self> {
        if message.is_empty() {
            return Err(Error::ShapeMismatch("message register is empty".into()));
        }
        let mv = message.concat(&workspace)?;
        if classical.len() != rounds.messages() {
            return Err(Error::ShapeMismatch(format!(
                "{} classicality flags for {} messages",
                classical.len(),
                rounds.messages()
            )));
        }
        let spec = Self {
            message,
            workspace,
            rounds,
            v1,
            v2,
            accept,
            classical,
        };
        match &spec.v1 {
            FirstVerifierAction::Channel(ch) => square_on(ch, &mv, "V1")?,
            FirstVerifierAction::PublicCoin { store, coin } => {
                if store == coin {
                    return Err(Error::ShapeMismatch("coin and store registers coincide".into()));
                }
                let d = spec.message.total_dim();
                for label in [store, coin] {
                    if spec.workspace.dim_of(label)? != d {
                        return Err(Error::ShapeMismatch(format!(
                            "public-coin register {label} must have the dimension {d} of M"
                        )));
                    }
                }
                if !spec.challenge_classical() {
                    return Err(Error::Classicality(
                        "public-coin challenges must be declared classical".into(),
                    ));
                }
            }
        }
        square_on(&spec.v2, &mv, "V2")?;
        if !mv.covers(spec.accept.layout()) {
            return Err(Error::ShapeMismatch(format!(
                "accept measurement on {} outside {mv}",
                spec.accept.layout()
            )));
        }
        Ok(spec)
    }

    pub fn message(&self) -> &RegisterLayout {
        &self.message
    }

    pub fn workspace(&self) -> &RegisterLayout {
        &self.workspace
    }

    pub fn rounds(&self) -> Rounds {
        self.rounds
    }

    pub fn v1(&self) -> &FirstVerifierAction {
        &self.v1
    }

    pub fn v2(&self) -> &KrausChannel {
        &self.v2
    }

    pub fn accept(&self) -> &MeasurementOperator {
        &self.accept
    }

    pub fn classical(&self) -> &[bool] {
        &self.classical
    }

    pub fn is_public_coin(&self) -> bool {
        matches!(self.v1, FirstVerifierAction::PublicCoin { .. })
    }

    /// `M ⊗ V`.
    pub fn verifier_layout(&self) -> RegisterLayout {
        self.message.concat(&self.workspace).expect("checked at construction")
    }

    /// Whether the prover's first (quantum) message is dephased; false for
    /// 2-message protocols, which have no such message.
    pub fn first_message_classical(&self) -> bool {
        self.rounds == Rounds::Three && self.classical[0]
    }

    pub fn challenge_classical(&self) -> bool {
        self.classical[self.rounds.messages() - 2]
    }

    pub fn response_classical(&self) -> bool {
        self.classical[self.rounds.messages() - 1]
    }

    /// Computational-basis strings of `M`: the challenge and response alphabet.
    pub fn alphabet(&self) -> Vec<String> {
        self.message.basis_labels()
    }
}
