use crate::channels::{Channel, EbChannel};
use crate::qmath::{
    embed_matrix, psd_sqrt, CMatrix, MeasurementOperator, Povm, C64,
};
use crate::{Error, Result};

use super::engine::{
    compile, lift_to_square, second_half, CoinMode, Joint, Step, CONDITIONING_FLOOR,
};
use super::spec::ProtocolSpec;
use super::strategy::{CanonicalProver, ProverStrategy};

/// Result of folding a general unentangled prover into canonical form.
#[derive(Clone, Debug)]
pub struct Canonicalization {
    pub prover: CanonicalProver,
    /// Index ℓ* of the retained outcome of φ1.
    pub branch: usize,
    /// Probability of each φ1 outcome.
    pub branch_probabilities: Vec<f64>,
    /// Acceptance conditioned on each outcome; `None` for outcomes that never occur.
    pub branch_acceptances: Vec<Option<f64>>,
}

/// Replaces a general unentangled prover by one that sends a pure state and
/// answers with a measure-and-prepare channel on `M`, without lowering the
/// acceptance probability.
///
/// Every outcome of φ1 is simulated to the end; the best one (lowest index
/// on ties) fixes the first message and the retained workspace state σ,
/// which is absorbed into the response measurement
/// F_k = tr_P[(√σ ⊗ I) λ2*(E_k ⊗ I) (√σ ⊗ I)].
pub fn canonicalize_prover(spec: &ProtocolSpec, prover: &ProverStrategy) -> Result<Canonicalization> {
    let ProverStrategy::UnentangledRaw(raw) = prover else {
        return Err(Error::Contract(format!(
            "canonicalization needs a general unentangled prover, got {}",
            prover.kind()
        )));
    };
    let compiled = compile(spec, prover)?;
    let message = spec.message();
    let layout = compiled.workspace.concat(message)?.concat(spec.workspace())?;
    let mut start = Joint::zero_state(layout);
    let first = compiled.first.as_ref().expect("raw provers have a first turn");
    start.step(&first[0])?;

    let phi1 = raw.phi1();
    let mut probabilities = Vec::with_capacity(phi1.outcomes());
    let mut acceptances = Vec::with_capacity(phi1.outcomes());
    let mut best: Option<(usize, f64, Joint)> = None;
    for ell in 0..phi1.outcomes() {
        let mut branch = start.clone();
        branch.step(&Step::Ops {
            on: phi1.in_layout().clone(),
            ops: lift_to_square(&phi1.outcome_kraus(ell), phi1.in_layout(), message),
        })?;
        let p = branch.trace();
        probabilities.push(p.max(0.0));
        if p < CONDITIONING_FLOOR {
            acceptances.push(None);
            continue;
        }
        branch.normalize();
        let retained = branch.clone();
        if spec.first_message_classical() {
            branch.step(&Step::Dephase(message.names().to_vec()))?;
        }
        let (_, acc) = second_half(spec, branch, &compiled.second, CoinMode::Coherent, &mut Vec::new())?;
        acceptances.push(Some(acc));
        if best.as_ref().is_none_or(|(_, b, _)| acc > *b + 1e-12) {
            best = Some((ell, acc, retained));
        }
    }
    let (branch, _, retained) =
        best.ok_or_else(|| Error::Contract("φ1 has no outcome of positive probability".into()))?;

    let workspace = &compiled.workspace;
    let sqrt_sigma = if workspace.is_empty() {
        CMatrix::identity(1, 1)
    } else {
        let rho = crate::qmath::Operator::from_parts(retained.layout.clone(), retained.rho.clone());
        let sigma = rho.partial_trace(workspace.names())?.into_matrix();
        psd_sqrt(&((&sigma + sigma.adjoint()) * C64::from(0.5)))
    };

    let pm = workspace.concat(message)?;
    let dm = message.total_dim();
    let dp = workspace.total_dim();
    let lambda2 = raw.lambda2();
    let lambda_pos = pm.positions(lambda2.in_layout().names())?;
    let lambda_ops: Vec<CMatrix> = lambda2
        .ops()
        .iter()
        .map(|k| embed_matrix(k, &pm, &lambda_pos))
        .collect();
    let phi2 = raw.phi2();
    let phi_pos = pm.positions(phi2.in_layout().names())?;
    let conj = sqrt_sigma.kronecker(&CMatrix::identity(dm, dm));
    let elements = phi2
        .povm()
        .elements()
        .iter()
        .map(|e| {
            let e = embed_matrix(e.matrix(), &pm, &phi_pos);
            let back = lambda_ops
                .iter()
                .fold(CMatrix::zeros(dp * dm, dp * dm), |acc, k| acc + k.adjoint() * &e * k);
            let g = &conj * back * &conj;
            let mut f = CMatrix::zeros(dm, dm);
            for p in 0..dp {
                f += g.view((p * dm, p * dm), (dm, dm));
            }
            let f = (&f + f.adjoint()) * C64::from(0.5);
            MeasurementOperator::from_matrix(message.clone(), f)
        })
        .collect::<Result<Vec<_>>>()?;
    let response = EbChannel::new(Povm::new(elements)?, phi2.preps().to_vec())?;
    let psi = phi1.preps()[branch].clone();
    Ok(Canonicalization {
        prover: CanonicalProver::new(psi, response)?,
        branch,
        branch_probabilities: probabilities,
        branch_acceptances: acceptances,
    })
}
