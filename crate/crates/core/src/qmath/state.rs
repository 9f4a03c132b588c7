use super::{CVector, Operator, RegisterLayout, Tensor, C64, VALIDATION_TOL};
use crate::{Error, Result};

/// Normalized state vector on a register layout.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    layout: RegisterLayout,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(layout: RegisterLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::Layout(format!(
                "{} amplitudes for layout {layout} of dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::Validation(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Rescale a nonzero vector to unit norm.
    pub fn normalized(layout: RegisterLayout, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(norm > 1e-300) || !norm.is_finite() {
            return Err(Error::Validation("cannot normalize a zero vector".into()));
        }
        Self::new(layout, amplitudes / C64::from(norm))
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        let n = layout.total_dim();
        if index >= n {
            return Err(Error::Layout(format!(
                "basis index {index} out of range for {layout}"
            )));
        }
        let mut v = CVector::zeros(n);
        v[index] = C64::new(1.0, 0.0);
        Ok(Self {
            layout,
            amplitudes: v,
        })
    }

    /// Basis state addressed by its computational-basis string.
    pub fn from_basis_label(layout: RegisterLayout, label: &str) -> Result<Self> {
        let i = layout.basis_index(label)?;
        Self::basis(layout, i)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// |ψ⟩⟨ψ| as an operator.
    pub fn projector(&self) -> Operator {
        Operator::from_parts(
            self.layout.clone(),
            &self.amplitudes * self.amplitudes.adjoint(),
        )
    }

    /// Complex conjugate in the computational basis.
    pub fn conjugate(&self) -> PureState {
        PureState {
            layout: self.layout.clone(),
            amplitudes: self.amplitudes.map(|z| z.conj()),
        }
    }

    pub fn with_layout(&self, layout: RegisterLayout) -> Result<PureState> {
        PureState::new(layout, self.amplitudes.clone())
    }
}

impl Tensor for PureState {
    type Output = PureState;

    fn tensor(&self, rhs: &PureState) -> Result<PureState> {
        Ok(PureState {
            layout: self.layout.concat(&rhs.layout)?,
            amplitudes: self.amplitudes.kronecker(&rhs.amplitudes),
        })
    }
}
