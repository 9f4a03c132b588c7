use crate::protocol::MeasurementFamily;
use crate::qmath::{eigh, PureState, CMatrix, C64};
use crate::{Error, Result};

use super::{check_weights, Method, ValueReport, Witness};

/// Largest number of response maps enumerated.
pub const ENUMERATION_BUDGET: f64 = 1e6;

/// max over g: Y → Z of λ_max(Σ_y w_y M_{y,g(y)}), the optimal acceptance
/// of a prover that sends a pure state and answers deterministically.
///
/// Only challenges of positive weight are enumerated; the others answer
/// the first response.
pub fn exact_classical_response_value(fam: &MeasurementFamily, weights: &[f64]) -> Result<ValueReport> {
    let ny = fam.challenges().len();
    let nz = fam.responses().len();
    check_weights(weights, ny)?;
    let active: Vec<usize> = (0..ny).filter(|&y| weights[y] > 0.0).collect();
    let needed = (nz as f64).powi(active.len() as i32);
    if needed > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            needed,
            budget: ENUMERATION_BUDGET,
        });
    }
    let d = fam.dim();
    let mut g = vec![0usize; ny];
    let mut best: Option<(f64, Vec<usize>, CMatrix)> = None;
    loop {
        let w = active.iter().fold(CMatrix::zeros(d, d), |acc, &y| {
            acc + fam.get(y, g[y]).matrix() * C64::from(weights[y])
        });
        let e = eigh(&w);
        if best.as_ref().is_none_or(|(b, _, _)| e.max() > *b) {
            let top = CMatrix::from_columns(&[e.top_vector().clone()]);
            best = Some((e.max(), g.clone(), top));
        }
        // Odometer over the active challenges, last one fastest.
        let mut k = active.len();
        loop {
            if k == 0 {
                let (value, responses, top) = best.expect("at least one map");
                let psi = PureState::normalized(fam.layout().clone(), top.column(0).into_owned())?;
                return Ok(ValueReport {
                    value: value.clamp(0.0, 1.0),
                    witness: Witness::ClassicalResponse {
                        psi: Some(psi),
                        responses,
                    },
                    iterates: vec![vec![value]],
                    method: Method::ExactClassical,
                    net_error: None,
                });
            }
            k -= 1;
            let y = active[k];
            g[y] += 1;
            if g[y] < nz {
                break;
            }
            g[y] = 0;
        }
    }
}
