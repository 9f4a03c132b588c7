//! Optimal prover values: exact enumeration for classical-response
//! provers, see-saw lower bounds for entangled provers, ε-net brute force
//! over canonical provers, the subsampling experiment and majority
//! amplification.

mod amplify;
mod brute;
mod exact;
mod seesaw;
mod subsample;

use serde::{Deserialize, Serialize};

use crate::qmath::{CMatrix, CVector, PureState};
use crate::{Error, Result};

pub use amplify::majority_amplify;
pub use brute::{brute_force_unentangled_value, fibonacci_state, nexp_decide, NexpDecision, Verdict};
pub use exact::{exact_classical_response_value, ENUMERATION_BUDGET};
pub use seesaw::{seesaw_entangled_value, MAX_SEESAW_RESPONSES};
pub use subsample::{subsample_deviation, subsampling_experiment, SubsampleReport, SubsampleTrial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub convergence_tol: f64,
    pub seed: u64,
    /// Points of the Fibonacci net on the Bloch sphere.
    pub net_resolution: usize,
    /// Dimension of the see-saw prover's kept register; defaults to that of `M`.
    pub private_dim: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 500,
            convergence_tol: 1e-9,
            seed: 0,
            net_resolution: 2000,
            private_dim: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Validation("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Validation("max_iters must be at least 1".into()));
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol.is_finite()) {
            return Err(Error::Validation(format!(
                "convergence_tol must be positive, got {}",
                self.convergence_tol
            )));
        }
        if self.net_resolution == 0 {
            return Err(Error::Validation("net_resolution must be at least 1".into()));
        }
        if self.private_dim == Some(0) {
            return Err(Error::Validation("private_dim must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactClassical,
    Seesaw,
    BruteForce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactClassical => "exact_classical",
            Method::Seesaw => "seesaw",
            Method::BruteForce => "brute_force",
        }
    }
}

/// Best strategy found by an optimizer.
#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// First message and response index for each challenge.
    ClassicalResponse { psi: Option<PureState>, responses: Vec<usize> },
    /// Joint state on `private ⊗ M` and response POVMs on the private register.
    Entangled { state: CVector, povms: Vec<Vec<CMatrix>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValueReport {
    pub value: f64,
    pub witness: Witness,
    /// Value sequence of each restart (a single entry for exact methods).
    pub iterates: Vec<Vec<f64>>,
    pub method: Method,
    /// Bound on the distance to the optimum of the searched class, if not exact.
    pub net_error: Option<f64>,
}

impl ValueReport {
    /// Largest iterate count over restarts.
    pub fn iterations(&self) -> usize {
        self.iterates.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Checks that `weights` is a distribution over `n` challenges.
pub(crate) fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::Validation(format!(
            "{} weights for {n} challenges",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Validation("weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

pub fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}
