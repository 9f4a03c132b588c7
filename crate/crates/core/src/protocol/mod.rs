//! Protocol schemas and exact density-matrix simulation.
//!
//! A 3-message interaction runs prover P1, verifier V1, prover P2, verifier
//! V2 followed by the accept measurement; a 2-message interaction drops P1.
//! Registers are the prover workspace `P` (owned by the strategy), the
//! message register `M` and the verifier workspace `V`, laid out as
//! `P ⊗ M ⊗ V`. Messages declared classical are dephased in the
//! computational basis of `M` at transmission.

mod canonical;
mod engine;
mod family;
pub mod instances;
mod spec;
mod strategy;

pub use canonical::{canonicalize_prover, Canonicalization};
pub use engine::{
    acceptance_by_coin_mixture, acceptance_probability, challenge_distribution,
    postselected_acceptance, simulate, MessageRecord, Sender, Transcript,
};
pub use family::MeasurementFamily;
pub use instances::{
    always_accept_protocol, chsh_family, chsh_protocol, chsh_qcip2_protocol, family_protocol,
};
pub use spec::{FirstVerifierAction, ProtocolSpec, Rounds};
pub use strategy::{CanonicalProver, ClassicalResponseProver, ProverStrategy, RawUnentangledProver};
