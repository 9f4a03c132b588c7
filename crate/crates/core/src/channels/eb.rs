use super::{Channel, KrausChannel};
use crate::qmath::{
    eigh, trace_product, CMatrix, MeasurementOperator, Povm, PureState, RegisterLayout, C64,
};
use crate::{Error, Result};

/// Measure-and-prepare channel Φ(ρ) = Σ_ℓ tr(E_ℓ ρ) |φ_ℓ⟩⟨φ_ℓ|.
#[derive(Clone, Debug, PartialEq)]
pub struct EbChannel {
    povm: Povm,
    preps: Vec<PureState>,
}

impl EbChannel {
    pub fn new(povm: Povm, preps: Vec<PureState>) -> Result<Self> {
        if preps.len() != povm.len() {
            return Err(Error::Validation(format!(
                "{} POVM elements but {} prepared states",
                povm.len(),
                preps.len()
            )));
        }
        let out = preps[0].layout();
        if let Some(p) = preps.iter().find(|p| p.layout() != out) {
            return Err(Error::Layout(format!(
                "prepared states on {} and {}",
                out,
                p.layout()
            )));
        }
        Ok(Self { povm, preps })
    }

    /// Measure in the computational basis and re-prepare the observed basis state.
    pub fn computational_measure_prepare(layout: RegisterLayout) -> Self {
        let preps = (0..layout.total_dim())
            .map(|i| PureState::basis(layout.clone(), i).expect("index in range"))
            .collect();
        Self {
            povm: Povm::computational(layout),
            preps,
        }
    }

    /// Discard the input and prepare `psi`.
    pub fn constant(in_layout: RegisterLayout, psi: PureState) -> Self {
        let povm = Povm::new(vec![MeasurementOperator::identity(in_layout)]).expect("{I} is a POVM");
        Self {
            povm,
            preps: vec![psi],
        }
    }

    /// Measure in the computational basis and answer basis string `responses[y]`.
    pub fn classical_response(
        in_layout: RegisterLayout,
        out_layout: RegisterLayout,
        responses: &[usize],
    ) -> Result<Self> {
        if responses.len() != in_layout.total_dim() {
            return Err(Error::Validation(format!(
                "{} responses for {} challenges",
                responses.len(),
                in_layout.total_dim()
            )));
        }
        let preps = responses
            .iter()
            .map(|&z| PureState::basis(out_layout.clone(), z))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            povm: Povm::computational(in_layout),
            preps,
        })
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn preps(&self) -> &[PureState] {
        &self.preps
    }

    pub fn outcomes(&self) -> usize {
        self.preps.len()
    }

    /// Kraus operators √λ |φ_ℓ⟩⟨e| over the eigenpairs (λ, e) of each E_ℓ.
    pub fn to_kraus(&self) -> KrausChannel {
        KrausChannel::new(
            self.in_layout().clone(),
            self.out_layout().clone(),
            self.kraus(),
        )
        .expect("measure-then-prepare Kraus operators are trace preserving")
    }

    /// Kraus operators of the single outcome `ell`.
    pub(crate) fn outcome_kraus(&self, ell: usize) -> Vec<CMatrix> {
        let e = &self.povm.elements()[ell];
        let phi = self.preps[ell].amplitudes();
        let spectrum = eigh(e.matrix());
        spectrum
            .values
            .iter()
            .zip(&spectrum.vectors)
            .filter(|(l, _)| **l > 1e-15)
            .map(|(l, v)| phi * v.adjoint() * C64::from(l.sqrt()))
            .collect()
    }
}

impl Channel for EbChannel {
    fn in_layout(&self) -> &RegisterLayout {
        self.povm.layout()
    }

    fn out_layout(&self) -> &RegisterLayout {
        self.preps[0].layout()
    }

    fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        let dout = self.out_layout().total_dim();
        self.povm
            .elements()
            .iter()
            .zip(&self.preps)
            .fold(CMatrix::zeros(dout, dout), |acc, (e, phi)| {
                let a = phi.amplitudes();
                acc + a * a.adjoint() * trace_product(e.matrix(), x)
            })
    }

    fn kraus(&self) -> Vec<CMatrix> {
        (0..self.outcomes()).flat_map(|l| self.outcome_kraus(l)).collect()
    }
}
