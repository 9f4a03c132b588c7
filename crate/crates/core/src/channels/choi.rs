use super::{Channel, EbChannel};
use crate::qmath::{
    eigh, identity, max_abs_diff, CMatrix, DensityMatrix, MeasurementOperator, Operator, Povm,
    PureState, RegisterLayout, C64, COMPLETENESS_TOL,
};
use crate::{Error, Result};

/// Label prefix of the reference copy of the input registers in a Choi state.
pub const REFERENCE_PREFIX: &str = "ref.";
/// Default max-entry tolerance for channel equality.
pub const DEFAULT_CHANNEL_TOL: f64 = 1e-9;
/// Minimum partial-transpose eigenvalue below which a Choi state is NPT.
pub const PPT_CUT: f64 = -1e-9;

/// Normalized Choi state (I ⊗ Φ)(|β⟩⟨β|), |β⟩ = d^{-1/2} Σ_j |j⟩|j⟩.
///
/// The layout is the reference copy of the input registers (labels prefixed
/// with [`REFERENCE_PREFIX`]) followed by the output registers.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    state: DensityMatrix,
    in_dim: usize,
    reference: RegisterLayout,
    output: RegisterLayout,
}

impl ChoiMatrix {
    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn reference_layout(&self) -> &RegisterLayout {
        &self.reference
    }

    pub fn output_layout(&self) -> &RegisterLayout {
        &self.output
    }

    pub fn max_entry_distance(&self, other: &ChoiMatrix) -> f64 {
        max_abs_diff(self.state.matrix(), other.state.matrix())
    }

    /// Reduced state on the reference copy; I/d for trace-preserving maps.
    pub fn reference_marginal(&self) -> DensityMatrix {
        self.state
            .partial_trace(self.reference.names())
            .expect("reference registers are present")
    }

    /// Partial transpose on the output factor.
    pub fn partial_transpose_output(&self) -> Operator {
        let mut op = self.state.as_operator().clone();
        for label in self.output.names() {
            op = op.partial_transpose(label).expect("output register is present");
        }
        op
    }
}

pub fn choi<C: Channel + ?Sized>(ch: &C) -> Result<ChoiMatrix> {
    let reference = RegisterLayout::new(
        ch.in_layout()
            .names()
            .iter()
            .map(|n| format!("{REFERENCE_PREFIX}{n}"))
            .zip(ch.in_layout().dims().iter().copied()),
    )?;
    let output = ch.out_layout().clone();
    let layout = reference.concat(&output)?;
    let (d, dout) = (ch.in_layout().total_dim(), output.total_dim());
    let mut m = CMatrix::zeros(d * dout, d * dout);
    let scale = C64::from(1.0 / d as f64);
    for j in 0..d {
        for k in 0..d {
            let mut e = CMatrix::zeros(d, d);
            e[(j, k)] = C64::new(1.0, 0.0);
            let block = ch.apply_matrix(&e);
            m.view_mut((j * dout, k * dout), (dout, dout))
                .copy_from(&(block * scale));
        }
    }
    Ok(ChoiMatrix {
        state: DensityMatrix::from_operator_unchecked(Operator::new(layout, m)?),
        in_dim: d,
        reference,
        output,
    })
}

/// Channels are equal iff their Choi states agree; compared entrywise.
pub fn channels_equal<A, B>(a: &A, b: &B, tol: f64) -> Result<bool>
where
    A: Channel + ?Sized,
    B: Channel + ?Sized,
{
    if a.in_layout() != b.in_layout() || a.out_layout() != b.out_layout() {
        return Err(Error::Layout(format!(
            "channels {} -> {} and {} -> {}",
            a.in_layout(),
            a.out_layout(),
            b.in_layout(),
            b.out_layout()
        )));
    }
    Ok(choi(a)?.max_entry_distance(&choi(b)?) <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PptVerdict {
    Ppt,
    Npt,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PptReport {
    pub min_pt_eigenvalue: f64,
    pub verdict: PptVerdict,
    /// PPT is sufficient for separability when in_dim · out_dim ≤ 6.
    pub certifies_eb: bool,
}

/// Partial-transpose test on the Choi state.
///
/// NPT proves the channel is not entanglement breaking. Eigenvalues in
/// (-1e-9, 0) are reported as PPT with the raw value attached.
pub fn check_eb_ppt<C: Channel + ?Sized>(ch: &C) -> Result<PptReport> {
    let c = choi(ch)?;
    let min = eigh(c.partial_transpose_output().matrix()).min();
    let verdict = if min < PPT_CUT {
        PptVerdict::Npt
    } else {
        PptVerdict::Ppt
    };
    let dims = ch.in_layout().total_dim() * ch.out_layout().total_dim();
    Ok(PptReport {
        min_pt_eigenvalue: min,
        verdict,
        certifies_eb: verdict == PptVerdict::Ppt && dims <= 6,
    })
}

/// One product term p |v⟩⟨v| ⊗ |w⟩⟨w| of a separable Choi decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableTerm {
    pub p: f64,
    pub v: PureState,
    pub w: PureState,
}

/// Measure-and-prepare channel whose Choi state is Σ p_ℓ |v_ℓ⟩⟨v_ℓ| ⊗ |w_ℓ⟩⟨w_ℓ|.
///
/// The measurement has elements d·p_ℓ·|v̄_ℓ⟩⟨v̄_ℓ| (complex conjugate of
/// the reference factor in the computational basis) and prepares |w_ℓ⟩.
/// For real v_ℓ this is the element d·p_ℓ·|v_ℓ⟩⟨v_ℓ|; the conjugate is what
/// makes the Choi round trip exact for complex reference factors.
pub fn eb_from_separable_choi(d: usize, terms: &[SeparableTerm]) -> Result<EbChannel> {
    let first = terms
        .first()
        .ok_or_else(|| Error::Validation("empty separable decomposition".into()))?;
    let (in_layout, out_layout) = (first.v.layout().clone(), first.w.layout().clone());
    if in_layout.total_dim() != d {
        return Err(Error::Layout(format!(
            "reference factors live on {in_layout}, expected dimension {d}"
        )));
    }
    let mut total = 0.0;
    for t in terms {
        if t.v.layout() != &in_layout || t.w.layout() != &out_layout {
            return Err(Error::Layout("terms on inconsistent layouts".into()));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(t.p >= 0.0) {
            return Err(Error::Validation(format!("negative weight {}", t.p)));
        }
        total += t.p;
    }
    if (total - 1.0).abs() > COMPLETENESS_TOL {
        return Err(Error::Validation(format!("weights sum to {total}, expected 1")));
    }
    let elements: Vec<CMatrix> = terms
        .iter()
        .map(|t| {
            let v = t.v.conjugate();
            v.projector().matrix() * C64::from(d as f64 * t.p)
        })
        .collect();
    let sum = elements
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, e| acc + e);
    let err = max_abs_diff(&sum, &identity(d));
    if err > COMPLETENESS_TOL {
        return Err(Error::Decomposition(format!(
            "d·Σ p_ℓ |v_ℓ⟩⟨v_ℓ| differs from the identity by {err:e}"
        )));
    }
    let povm = Povm::new(
        elements
            .into_iter()
            .map(|e| MeasurementOperator::from_operator_unchecked(Operator::from_parts(in_layout.clone(), e)))
            .collect(),
    )?;
    EbChannel::new(povm, terms.iter().map(|t| t.w.clone()).collect())
}
