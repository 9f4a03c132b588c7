use super::{
    eigh, embed_matrix, identity, max_abs_diff, trace_product, CMatrix, EigenDecomposition,
    PureState, RegisterLayout, Tensor, C64, COMPLETENESS_TOL, VALIDATION_TOL,
};
use crate::{Error, Result};

/// Square complex matrix on a register layout, with no further invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    layout: RegisterLayout,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(layout: RegisterLayout, matrix: CMatrix) -> Result<Self> {
        let n = layout.total_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::Layout(format!(
                "{}x{} matrix for layout {layout} of dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { layout, matrix })
    }

    pub(crate) fn from_parts(layout: RegisterLayout, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        Self { layout, matrix }
    }

    pub fn identity(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        Self::from_parts(layout, identity(n))
    }

    pub fn zeros(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        Self::from_parts(layout, CMatrix::zeros(n, n))
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Operator {
        Self::from_parts(self.layout.clone(), self.matrix.adjoint())
    }

    /// max |A - A†|.
    pub fn hermiticity_error(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }

    pub fn max_entry_distance(&self, other: &Operator) -> Result<f64> {
        if self.layout != other.layout {
            return Err(Error::Layout(format!(
                "cannot compare operators on {} and {}",
                self.layout, other.layout
            )));
        }
        Ok(max_abs_diff(&self.matrix, &other.matrix))
    }

    pub fn scaled(&self, factor: f64) -> Operator {
        Self::from_parts(self.layout.clone(), &self.matrix * C64::from(factor))
    }

    /// Spectrum of the operator; it must be Hermitian within 1e-8.
    pub fn eig(&self) -> Result<EigenDecomposition> {
        super::hermitian_eig(&self.matrix)
    }

    /// Reduced operator on `keep`; the result lists the kept registers in
    /// the order they appear in this layout.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<Operator> {
        if keep.is_empty() {
            return Err(Error::Layout("partial trace must keep at least one register".into()));
        }
        let mut kept = self.layout.positions(keep)?;
        kept.sort_unstable();
        kept.dedup();
        let traced: Vec<usize> = (0..self.layout.len()).filter(|p| !kept.contains(p)).collect();
        let out_layout = RegisterLayout::new(
            kept.iter()
                .map(|&p| (self.layout.names()[p].clone(), self.layout.dims()[p])),
        )?;
        let k = self.layout.sub_indices(&kept);
        let t = self.layout.sub_indices(&traced);
        let m = out_layout.total_dim();
        let mut out = CMatrix::zeros(m, m);
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if t[i] == t[j] {
                    out[(k[i], k[j])] += self.matrix[(i, j)];
                }
            }
        }
        Ok(Self::from_parts(out_layout, out))
    }

    /// Transpose on the named register only.
    pub fn partial_transpose(&self, label: &str) -> Result<Operator> {
        let p = self.layout.position(label)?;
        let stride = self.layout.strides()[p];
        let d = self.layout.dims()[p];
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            let di = (i / stride) % d;
            for j in 0..n {
                let dj = (j / stride) % d;
                // swap the digit of register p between row and column
                let ii = i - di * stride + dj * stride;
                let jj = j - dj * stride + di * stride;
                out[(i, j)] = self.matrix[(ii, jj)];
            }
        }
        Ok(Self::from_parts(self.layout.clone(), out))
    }

    /// Same operator with the registers permuted into `order`.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Operator> {
        let new_layout = self.layout.select(order)?;
        if new_layout.len() != self.layout.len() {
            return Err(Error::Layout(format!(
                "reorder needs every register of {}",
                self.layout
            )));
        }
        // old index of every new basis index
        let pos_in_new: Vec<usize> = self
            .layout
            .names()
            .iter()
            .map(|n| new_layout.position(n))
            .collect::<Result<_>>()?;
        let old = new_layout.sub_indices(&pos_in_new);
        let n = self.dim();
        let out = CMatrix::from_fn(n, n, |i, j| self.matrix[(old[i], old[j])]);
        Ok(Self::from_parts(new_layout, out))
    }

    /// Extend to `layout` by tensoring with the identity on the registers
    /// this operator does not act on.
    pub fn embed(&self, layout: &RegisterLayout) -> Result<Operator> {
        if !layout.covers(&self.layout) {
            return Err(Error::Layout(format!(
                "cannot embed operator on {} into {layout}",
                self.layout
            )));
        }
        let targets = layout.positions(self.layout.names())?;
        Ok(Self::from_parts(
            layout.clone(),
            embed_matrix(&self.matrix, layout, &targets),
        ))
    }
}

impl Tensor for Operator {
    type Output = Operator;

    fn tensor(&self, rhs: &Operator) -> Result<Operator> {
        Ok(Self::from_parts(
            self.layout.concat(&rhs.layout)?,
            self.matrix.kronecker(&rhs.matrix),
        ))
    }
}

fn check_hermitian(op: &Operator, what: &str) -> Result<()> {
    let err = op.hermiticity_error();
    if err > VALIDATION_TOL {
        return Err(Error::Validation(format!(
            "{what} is not Hermitian (max |A - A†| = {err:e})"
        )));
    }
    Ok(())
}

/// Unit-trace positive semidefinite operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self> {
        check_hermitian(&op, "density matrix")?;
        let tr = op.trace();
        if (tr.re - 1.0).abs() > VALIDATION_TOL || tr.im.abs() > VALIDATION_TOL {
            return Err(Error::Validation(format!("density matrix has trace {tr}")));
        }
        let min = eigh(op.matrix()).min();
        if min < -VALIDATION_TOL {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self(op))
    }

    pub fn from_matrix(layout: RegisterLayout, matrix: CMatrix) -> Result<Self> {
        Self::new(Operator::new(layout, matrix)?)
    }

    pub(crate) fn from_operator_unchecked(op: Operator) -> Self {
        Self(op)
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self(psi.projector())
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        Self(Operator::identity(layout).scaled(1.0 / n as f64))
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        Ok(Self::from_pure(&PureState::basis(layout, index)?))
    }

    pub fn layout(&self) -> &RegisterLayout {
        self.0.layout()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        Ok(Self(self.0.partial_trace(keep)?))
    }

    pub fn partial_transpose(&self, label: &str) -> Result<Operator> {
        self.0.partial_transpose(label)
    }

    pub fn max_entry_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.0.max_entry_distance(&other.0)
    }
}

impl Tensor for DensityMatrix {
    type Output = DensityMatrix;

    fn tensor(&self, rhs: &DensityMatrix) -> Result<DensityMatrix> {
        Ok(Self(self.0.tensor(&rhs.0)?))
    }
}

/// Effect operator `0 ⪯ E ⪯ I`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOperator(Operator);

impl MeasurementOperator {
    pub fn new(op: Operator) -> Result<Self> {
        check_hermitian(&op, "measurement operator")?;
        let e = eigh(op.matrix());
        if e.min() < -VALIDATION_TOL || e.max() > 1.0 + VALIDATION_TOL {
            return Err(Error::Validation(format!(
                "measurement operator spectrum [{:e}, {}] leaves [0, 1]",
                e.min(),
                e.max()
            )));
        }
        Ok(Self(op))
    }

    pub fn from_matrix(layout: RegisterLayout, matrix: CMatrix) -> Result<Self> {
        Self::new(Operator::new(layout, matrix)?)
    }

    pub(crate) fn from_operator_unchecked(op: Operator) -> Self {
        Self(op)
    }

    pub fn identity(layout: RegisterLayout) -> Self {
        Self(Operator::identity(layout))
    }

    pub fn projector(psi: &PureState) -> Self {
        Self(psi.projector())
    }

    /// I - E.
    pub fn complement(&self) -> MeasurementOperator {
        let n = self.0.dim();
        Self(Operator::from_parts(
            self.0.layout().clone(),
            identity(n) - self.0.matrix(),
        ))
    }

    pub fn layout(&self) -> &RegisterLayout {
        self.0.layout()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }
}

impl Tensor for MeasurementOperator {
    type Output = MeasurementOperator;

    fn tensor(&self, rhs: &MeasurementOperator) -> Result<MeasurementOperator> {
        Ok(Self(self.0.tensor(&rhs.0)?))
    }
}

/// Measurement operators on a shared layout summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<MeasurementOperator>,
}

impl Povm {
    pub fn new(elements: Vec<MeasurementOperator>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::Validation("POVM with no elements".into()))?;
        let layout = first.layout().clone();
        let n = layout.total_dim();
        let mut sum = CMatrix::zeros(n, n);
        for e in &elements {
            if *e.layout() != layout {
                return Err(Error::Layout(format!(
                    "POVM elements on {} and {}",
                    layout,
                    e.layout()
                )));
            }
            sum += e.matrix();
        }
        let err = max_abs_diff(&sum, &identity(n));
        if err > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "POVM elements sum to identity only within {err:e}"
            )));
        }
        Ok(Self { elements })
    }

    /// Projective measurement in the computational basis.
    pub fn computational(layout: RegisterLayout) -> Self {
        let elements = (0..layout.total_dim())
            .map(|i| {
                MeasurementOperator::projector(
                    &PureState::basis(layout.clone(), i).expect("index in range"),
                )
            })
            .collect();
        Self { elements }
    }

    pub fn elements(&self) -> &[MeasurementOperator] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn layout(&self) -> &RegisterLayout {
        self.elements[0].layout()
    }

    /// Outcome distribution on `rho`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        self.elements
            .iter()
            .map(|e| born_probability(e, rho))
            .collect()
    }
}

/// tr(E ρ), snapped to [0, 1] when within 1e-10 of the boundary.
pub fn born_probability(e: &MeasurementOperator, rho: &DensityMatrix) -> Result<f64> {
    if e.layout() != rho.layout() {
        return Err(Error::Layout(format!(
            "measurement on {} applied to state on {}",
            e.layout(),
            rho.layout()
        )));
    }
    let p = trace_product(e.matrix(), rho.matrix()).re;
    if (-VALIDATION_TOL..0.0).contains(&p) {
        Ok(0.0)
    } else if p > 1.0 && p <= 1.0 + VALIDATION_TOL {
        Ok(1.0)
    } else if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::Validation(format!("Born probability {p} outside [0, 1]")))
    }
}
