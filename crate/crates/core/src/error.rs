use thiserror::Error;

/// Errors raised by the simulator and optimizers.
#[derive(Debug, Error)]
pub enum Error {
    /// Unknown register label, duplicated label, or mismatched layouts.
    #[error("layout error: {0}")]
    Layout(String),

    /// An input failed its numeric validation (hermiticity, trace, norm, ...).
    #[error("validation error: {0}")]
    Validation(String),

    /// A separable decomposition does not induce a complete POVM.
    #[error("decomposition error: {0}")]
    Decomposition(String),

    /// Prover or protocol shapes do not fit together.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A prover form is incompatible with the declared message classicality.
    #[error("classicality violation: {0}")]
    Classicality(String),

    /// An operation was called on an input outside its contract.
    #[error("contract error: {0}")]
    Contract(String),

    /// Conditioning on an event of zero probability.
    #[error("conditioning on zero-probability message {message:?} (probability {probability:e})")]
    Conditioning { message: String, probability: f64 },

    /// The instance is too large for the requested algorithm.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Exhaustive enumeration would exceed its budget.
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: f64, budget: f64 },

    /// The epsilon-net is too coarse for the requested completeness/soundness gap.
    #[error("insufficient resolution: net error {net_error:.6} must be below {required:.6}")]
    InsufficientResolution { net_error: f64, required: f64 },

    /// Malformed serialized document.
    #[error("document error: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
