use super::{max_abs_diff, CMatrix, CVector, C64};
use crate::{Error, Result};

/// Hermiticity tolerance accepted by [`hermitian_eig`].
pub const EIG_HERMITIAN_TOL: f64 = 1e-8;

/// Spectrum of a Hermitian operator, eigenvalues sorted in descending order.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<CVector>,
}

impl EigenDecomposition {
    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    pub fn top_vector(&self) -> &CVector {
        &self.vectors[0]
    }

    /// Σ λ_k v_k v_k†.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.vectors.first().map_or(0, |v| v.len());
        let mut out = CMatrix::zeros(n, n);
        for (l, v) in self.values.iter().zip(&self.vectors) {
            out += v * v.adjoint() * C64::from(*l);
        }
        out
    }

    /// Apply a real function to the spectrum.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.first().map_or(0, |v| v.len());
        let mut out = CMatrix::zeros(n, n);
        for (l, v) in self.values.iter().zip(&self.vectors) {
            let fl = f(*l);
            if fl != 0.0 {
                out += v * v.adjoint() * C64::from(fl);
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails with a validation error when `m` is not square or deviates from its
/// adjoint by more than [`EIG_HERMITIAN_TOL`] in any entry.
pub fn hermitian_eig(m: &CMatrix) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Validation(format!(
            "eigendecomposition of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let err = max_abs_diff(m, &m.adjoint());
    if err > EIG_HERMITIAN_TOL {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian (max |A - A†| = {err:e})"
        )));
    }
    Ok(eigh(m))
}

/// Eigendecomposition of the Hermitian part of `m`.
pub(crate) fn eigh(m: &CMatrix) -> EigenDecomposition {
    let n = m.nrows();
    if n == 0 {
        return EigenDecomposition {
            values: vec![],
            vectors: vec![],
        };
    }
    let herm = (m + m.adjoint()) * C64::from(0.5);
    let se = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    EigenDecomposition {
        values: order.iter().map(|&k| se.eigenvalues[k]).collect(),
        vectors: order
            .iter()
            .map(|&k| se.eigenvectors.column(k).into_owned())
            .collect(),
    }
}

/// Square root of a positive semidefinite matrix (negative noise clipped).
pub(crate) fn psd_sqrt(m: &CMatrix) -> CMatrix {
    eigh(m).map(|l| l.max(0.0).sqrt())
}

/// Inverse square root of a positive definite matrix.
pub(crate) fn pd_inv_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let e = eigh(m);
    if e.min() <= 1e-12 * e.max().max(1.0) {
        return Err(Error::Validation(format!(
            "matrix is singular (min eigenvalue {:e})",
            e.min()
        )));
    }
    Ok(e.map(|l| 1.0 / l.sqrt()))
}
