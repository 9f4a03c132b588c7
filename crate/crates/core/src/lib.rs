//! Desk-scale laboratory for unentangled quantum interactive proofs.
//!
//! The crate simulates 2- and 3-message prover/verifier interactions over
//! small registers with exact density matrices, restricts provers to
//! measure-and-prepare (entanglement-breaking) channels, and computes optimal
//! prover values:
//!
//! - [`qmath`]: dense complex linear algebra over labelled registers.
//! - [`channels`]: Kraus and measure-and-prepare channels, Choi states, PPT tests.
//! - [`protocol`]: protocol schemas, exact simulation, prover canonicalization
//!   and postselected acceptance.
//! - [`optimize`]: exact classical-response values, see-saw lower bounds for
//!   entangled provers, epsilon-net brute force, subsampling experiments and
//!   majority amplification.
//! - [`doc`]: JSON documents for channels, protocols and strategies.

#![forbid(unsafe_code)]

pub mod channels;
pub mod doc;
mod error;
pub mod optimize;
pub mod protocol;
pub mod qmath;
pub mod random;
pub mod rng;

pub use error::{Error, Result};
