//! Dense complex linear algebra over labelled register layouts.
//!
//! Operators and states carry a [`RegisterLayout`]; formulas address
//! registers by label, never by position. Validated wrappers
//! ([`DensityMatrix`], [`MeasurementOperator`], [`Povm`], [`PureState`])
//! are immutable once constructed.

mod eig;
mod layout;
mod operator;
mod state;

pub use eig::{hermitian_eig, EigenDecomposition, EIG_HERMITIAN_TOL};
pub use layout::RegisterLayout;
pub use operator::{born_probability, DensityMatrix, MeasurementOperator, Operator, Povm};
pub use state::PureState;

pub(crate) use eig::{eigh, pd_inv_sqrt, psd_sqrt};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// Default tolerance for state and operator validation.
pub const VALIDATION_TOL: f64 = 1e-10;
/// Tolerance for POVM completeness and trace preservation.
pub const COMPLETENESS_TOL: f64 = 1e-8;

/// Kronecker product with `self` as the most significant factor.
pub trait Tensor<Rhs: ?Sized = Self> {
    type Output;

    fn tensor(&self, rhs: &Rhs) -> crate::Result<Self::Output>;
}

/// Largest entry magnitude of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// tr(a·b) without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub(crate) fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Full-size matrix acting as `op` on `targets` (in that order) and as the
/// identity on every other register of `layout`.
pub(crate) fn embed_matrix(op: &CMatrix, layout: &RegisterLayout, targets: &[usize]) -> CMatrix {
    let n = layout.total_dim();
    if targets.len() == layout.len() && targets.iter().enumerate().all(|(k, &p)| k == p) {
        return op.clone();
    }
    let rest: Vec<usize> = (0..layout.len()).filter(|p| !targets.contains(p)).collect();
    let t = layout.sub_indices(targets);
    let r = layout.sub_indices(&rest);
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if r[i] == r[j] {
                out[(i, j)] = op[(t[i], t[j])];
            }
        }
    }
    out
}

/// Computational-basis dephasing of the registers at `positions`: zero
/// every entry whose row and column disagree on those registers.
pub(crate) fn dephase_matrix(m: &CMatrix, layout: &RegisterLayout, positions: &[usize]) -> CMatrix {
    let s = layout.sub_indices(positions);
    let mut out = m.clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if s[i] != s[j] {
                out[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
