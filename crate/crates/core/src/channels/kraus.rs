use super::Channel;
use crate::qmath::{
    identity, max_abs_diff, CMatrix, MeasurementOperator, Operator, RegisterLayout,
    COMPLETENESS_TOL,
};
use crate::{Error, Result};

/// CPTP map ρ ↦ Σ K ρ K† with Σ K†K = I.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    in_layout: RegisterLayout,
    out_layout: RegisterLayout,
    ops: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(in_layout: RegisterLayout, out_layout: RegisterLayout, ops: Vec<CMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::Validation("Kraus channel with no operators".into()));
        }
        let (din, dout) = (in_layout.total_dim(), out_layout.total_dim());
        let mut sum = CMatrix::zeros(din, din);
        for k in &ops {
            if k.shape() != (dout, din) {
                return Err(Error::Layout(format!(
                    "Kraus operator is {}x{}, expected {dout}x{din}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            sum += k.adjoint() * k;
        }
        let err = max_abs_diff(&sum, &identity(din));
        if err > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "Kraus operators are not trace preserving (max |Σ K†K - I| = {err:e})"
            )));
        }
        Ok(Self {
            in_layout,
            out_layout,
            ops,
        })
    }

    pub fn identity(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        Self {
            in_layout: layout.clone(),
            out_layout: layout,
            ops: vec![identity(n)],
        }
    }

    pub fn unitary(layout: RegisterLayout, u: CMatrix) -> Result<Self> {
        let n = layout.total_dim();
        if u.shape() != (n, n) {
            return Err(Error::Layout(format!("unitary of shape {:?} on {layout}", u.shape())));
        }
        let err = max_abs_diff(&(&u * u.adjoint()), &identity(n));
        if err > COMPLETENESS_TOL {
            return Err(Error::Validation(format!("matrix is not unitary (error {err:e})")));
        }
        Self::new(layout.clone(), layout, vec![u])
    }

    /// Computational-basis dephasing {|i⟩⟨i|}.
    pub fn dephasing(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        let ops = (0..n)
            .map(|i| {
                let mut k = CMatrix::zeros(n, n);
                k[(i, i)] = 1.0.into();
                k
            })
            .collect();
        Self {
            in_layout: layout.clone(),
            out_layout: layout,
            ops,
        }
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// Heisenberg-picture action Ψ*(X) = Σ K† X K.
    pub fn adjoint_apply_operator(&self, x: &Operator) -> Result<Operator> {
        if x.layout() != &self.out_layout {
            return Err(Error::Layout(format!(
                "adjoint of channel into {} applied to operator on {}",
                self.out_layout,
                x.layout()
            )));
        }
        let din = self.in_layout.total_dim();
        let out = self
            .ops
            .iter()
            .fold(CMatrix::zeros(din, din), |acc, k| acc + k.adjoint() * x.matrix() * k);
        Operator::new(self.in_layout.clone(), out)
    }

    /// Ψ*(E); the adjoint of a CPTP map is completely positive and unital,
    /// so effects map to effects.
    pub fn adjoint_apply(&self, e: &MeasurementOperator) -> Result<MeasurementOperator> {
        let out = self.adjoint_apply_operator(e.as_operator())?;
        let m = out.matrix();
        let herm = (m + m.adjoint()) * crate::qmath::C64::from(0.5);
        Ok(MeasurementOperator::from_operator_unchecked(Operator::new(
            self.in_layout.clone(),
            herm,
        )?))
    }
}

impl Channel for KrausChannel {
    fn in_layout(&self) -> &RegisterLayout {
        &self.in_layout
    }

    fn out_layout(&self) -> &RegisterLayout {
        &self.out_layout
    }

    fn apply_matrix(&self, x: &CMatrix) -> CMatrix {
        let dout = self.out_layout.total_dim();
        self.ops
            .iter()
            .fold(CMatrix::zeros(dout, dout), |acc, k| acc + k * x * k.adjoint())
    }

    fn kraus(&self) -> Vec<CMatrix> {
        self.ops.clone()
    }
}
