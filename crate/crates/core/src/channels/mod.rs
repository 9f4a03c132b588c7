//! Quantum channels on labelled registers.
//!
//! Two representations are supported: general CPTP maps in Kraus form
//! ([`KrausChannel`]) and measure-and-prepare maps
//! `Φ(ρ) = Σ_ℓ tr(E_ℓ ρ) |φ_ℓ⟩⟨φ_ℓ|` ([`EbChannel`]). Both implement
//! [`Channel`], so Choi states, equality tests and the PPT check work on
//! either.

mod choi;
mod eb;
mod kraus;

pub use choi::{
    channels_equal, check_eb_ppt, choi, eb_from_separable_choi, ChoiMatrix, PptReport,
    PptVerdict, SeparableTerm, DEFAULT_CHANNEL_TOL, PPT_CUT, REFERENCE_PREFIX,
};
pub use eb::EbChannel;
pub use kraus::KrausChannel;

use crate::qmath::{CMatrix, DensityMatrix, Operator, RegisterLayout};
use crate::{Error, Result};

/// A linear map between operator spaces of two register layouts.
pub trait Channel {
    fn in_layout(&self) -> &RegisterLayout;

    fn out_layout(&self) -> &RegisterLayout;

    /// Action on an arbitrary (not necessarily positive) input matrix.
    fn apply_matrix(&self, x: &CMatrix) -> CMatrix;

    /// An equivalent list of Kraus operators (out_dim × in_dim).
    fn kraus(&self) -> Vec<CMatrix>;

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.layout() != self.in_layout() {
            return Err(Error::Layout(format!(
                "channel on {} applied to state on {}",
                self.in_layout(),
                rho.layout()
            )));
        }
        let out = Operator::new(self.out_layout().clone(), self.apply_matrix(rho.matrix()))?;
        Ok(DensityMatrix::from_operator_unchecked(out))
    }
}

/// Either channel representation, as read from a channel document.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyChannel {
    Kraus(KrausChannel),
    Eb(EbChannel),
}

impl AnyChannel {
    pub fn form(&self) -> &'static str {
        match self {
            AnyChannel::Kraus(_) => "kraus",
            AnyChannel::Eb(_) => "eb",
        }
    }
}

impl Channel for AnyChannel {
    fn in_layout(&self) -> &RegisterLayout {
        match self {
            AnyChannel::Kraus(c) => c.in_layout(),
            AnyChannel::Eb(c) => c.in_layout(),
        }
    }

    fn out_layout(&self) -> &RegisterLayout {
        match self {
            AnyChannel::Kraus(c) => c.out_layout(),
            AnyChannel::Eb(c) => c.out_layout(),
        }
    }

    fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        match self {
            AnyChannel::Kraus(c) => c.apply_matrix(x),
            AnyChannel::Eb(c) => c.apply_matrix(x),
        }
    }

    fn kraus(&self) -> Vec<CMatrix> {
        match self {
            AnyChannel::Kraus(c) => c.kraus(),
            AnyChannel::Eb(c) => c.kraus(),
        }
    }
}
