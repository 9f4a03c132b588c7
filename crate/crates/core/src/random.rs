//! Seeded random instances: states, effects, channels and separable
//! decompositions used by the experiments and test suites.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channels::{EbChannel, KrausChannel, SeparableTerm};
use crate::qmath::{
    pd_inv_sqrt, CMatrix, CVector, DensityMatrix, MeasurementOperator, Operator, Povm,
    PureState, RegisterLayout, C64,
};
use crate::Result;

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let entries: Vec<C64> = (0..rows * cols).map(|_| gaussian_complex(rng)).collect();
    CMatrix::from_row_slice(rows, cols, &entries)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| gaussian_complex(rng))
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, layout: &RegisterLayout) -> PureState {
    let v = gaussian_vector(rng, layout.total_dim());
    PureState::normalized(layout.clone(), v).expect("gaussian vector is nonzero")
}

/// Full-rank density matrix G G† / tr(G G†) with Ginibre G.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, layout: &RegisterLayout) -> DensityMatrix {
    let n = layout.total_dim();
    let g = gaussian_matrix(rng, n, n);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let m = m.map(|z| z / tr);
    let m = (&m + m.adjoint()) * C64::from(0.5);
    DensityMatrix::from_matrix(layout.clone(), m).expect("Ginibre state is valid")
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.adjoint()) * C64::from(0.5)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Effect U diag(u) U† with Haar U and uniform eigenvalues in [0, 1].
pub fn random_effect<R: Rng + ?Sized>(rng: &mut R, layout: &RegisterLayout) -> MeasurementOperator {
    let n = layout.total_dim();
    let u = random_unitary(rng, n);
    let d = CMatrix::from_diagonal(&CVector::from_fn(n, |_, _| C64::from(rng.random::<f64>())));
    let m = &u * d * u.adjoint();
    let m = (&m + m.adjoint()) * C64::from(0.5);
    MeasurementOperator::from_matrix(layout.clone(), m).expect("random effect is valid")
}

/// POVM S^{-1/2} A_k S^{-1/2} from Wishart-distributed A_k with S = Σ A_k.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, layout: &RegisterLayout, outcomes: usize) -> Povm {
    let n = layout.total_dim();
    let parts: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let g = gaussian_matrix(rng, n, n);
            &g * g.adjoint()
        })
        .collect();
    let sum = parts.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
    let s = pd_inv_sqrt(&sum).expect("Wishart sum is positive definite");
    let elements = parts
        .iter()
        .map(|p| {
            let e = &s * p * &s;
            let e = (&e + e.adjoint()) * C64::from(0.5);
            MeasurementOperator::new(Operator::new(layout.clone(), e)?)
        })
        .collect::<Result<Vec<_>>>()
        .expect("normalized Wishart elements are effects");
    Povm::new(elements).expect("normalized Wishart elements are complete")
}

/// Channel with `n_ops` Kraus operators A_k S^{-1/2}, S = Σ A_k† A_k.
pub fn random_kraus_channel<R: Rng + ?Sized>(
    rng: &mut R,
    in_layout: &RegisterLayout,
    out_layout: &RegisterLayout,
    n_ops: usize,
) -> KrausChannel {
    let (din, dout) = (in_layout.total_dim(), out_layout.total_dim());
    let raw: Vec<CMatrix> = (0..n_ops).map(|_| gaussian_matrix(rng, dout, din)).collect();
    let s = raw
        .iter()
        .fold(CMatrix::zeros(din, din), |acc, a| acc + a.adjoint() * a);
    let s = pd_inv_sqrt(&s).expect("Kraus normalization is positive definite");
    let ops = raw.iter().map(|a| a * &s).collect();
    KrausChannel::new(in_layout.clone(), out_layout.clone(), ops)
        .expect("normalized Kraus operators are trace preserving")
}

/// Random unitary channel on `layout`.
pub fn random_unitary_channel<R: Rng + ?Sized>(rng: &mut R, layout: &RegisterLayout) -> KrausChannel {
    let u = random_unitary(rng, layout.total_dim());
    KrausChannel::unitary(layout.clone(), u).expect("QR factor is unitary")
}

pub fn random_eb_channel<R: Rng + ?Sized>(
    rng: &mut R,
    in_layout: &RegisterLayout,
    out_layout: &RegisterLayout,
    outcomes: usize,
) -> EbChannel {
    let povm = random_povm(rng, in_layout, outcomes);
    let preps = (0..outcomes).map(|_| random_state(rng, out_layout)).collect();
    EbChannel::new(povm, preps).expect("random measure-and-prepare channel is valid")
}

/// Valid separable decomposition Σ p_ℓ |v_ℓ⟩⟨v_ℓ| ⊗ |w_ℓ⟩⟨w_ℓ| of a Choi
/// state: the reference factors satisfy Σ p_ℓ |v_ℓ⟩⟨v_ℓ| = I/d.
pub fn random_separable_terms<R: Rng + ?Sized>(
    rng: &mut R,
    in_layout: &RegisterLayout,
    out_layout: &RegisterLayout,
    terms: usize,
) -> Vec<SeparableTerm> {
    let d = in_layout.total_dim();
    assert!(terms >= d, "need at least d terms to span the input space");
    let raw: Vec<CVector> = (0..terms).map(|_| gaussian_vector(rng, d)).collect();
    let frame = raw
        .iter()
        .fold(CMatrix::zeros(d, d), |acc, u| acc + u * u.adjoint());
    let s = pd_inv_sqrt(&frame).expect("frame operator is positive definite");
    raw.iter()
        .map(|u| {
            let v = &s * u;
            let weight = v.norm_squared() / d as f64;
            SeparableTerm {
                p: weight,
                v: PureState::normalized(in_layout.clone(), v).expect("nonzero"),
                w: random_state(rng, out_layout),
            }
        })
        .collect()
}

/// Random Hermitian with a prescribed spectrum in a Haar-random basis.
pub fn hermitian_with_spectrum<R: Rng + ?Sized>(rng: &mut R, spectrum: &[f64]) -> CMatrix {
    let n = spectrum.len();
    let u = random_unitary(rng, n);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(n, spectrum.iter().map(|&x| C64::from(x))));
    let m = &u * d * u.adjoint();
    (&m + m.adjoint()) * C64::from(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::max_abs_diff;
    use crate::rng::stream;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = stream(1, 0);
        let u = random_unitary(&mut rng, 4);
        assert!(max_abs_diff(&(u.adjoint() * &u), &CMatrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn separable_terms_are_valid() {
        let mut rng = stream(2, 0);
        let l = RegisterLayout::qubits(&["A"]).unwrap();
        let terms = random_separable_terms(&mut rng, &l, &l, 5);
        let total: f64 = terms.iter().map(|t| t.p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mut frame = CMatrix::zeros(2, 2);
        for t in &terms {
            frame += t.v.projector().matrix() * C64::from(2.0 * t.p);
        }
        assert!(max_abs_diff(&frame, &CMatrix::identity(2, 2)) < 1e-12);
    }
}
