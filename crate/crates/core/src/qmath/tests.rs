use super::*;
use crate::random::{random_density, random_hermitian, random_povm, random_state};
use crate::rng::stream;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn qubit(label: &str) -> RegisterLayout {
    RegisterLayout::qubits(&[label]).unwrap()
}

fn plus(label: &str) -> PureState {
    PureState::normalized(qubit(label), CVector::from_vec(vec![c(1.0), c(1.0)])).unwrap()
}

fn minus(label: &str) -> PureState {
    PureState::normalized(qubit(label), CVector::from_vec(vec![c(1.0), c(-1.0)])).unwrap()
}

fn bell() -> PureState {
    let l = RegisterLayout::qubits(&["A", "B"]).unwrap();
    let s = 0.5f64.sqrt();
    PureState::new(l, CVector::from_vec(vec![c(s), c(0.0), c(0.0), c(s)])).unwrap()
}

#[test]
fn identity_tensor_identity() {
    let i = Operator::identity(qubit("A")).tensor(&Operator::identity(qubit("B"))).unwrap();
    assert_eq!(i.matrix(), &CMatrix::identity(4, 4));
    assert_eq!(i.layout().names(), &["A".to_string(), "B".to_string()]);
}

#[test]
fn projector_tensor_projector() {
    let p0 = DensityMatrix::basis(qubit("A"), 0).unwrap();
    let p1 = DensityMatrix::basis(qubit("B"), 1).unwrap();
    let p = p0.tensor(&p1).unwrap();
    let expected = DensityMatrix::basis(RegisterLayout::qubits(&["A", "B"]).unwrap(), 1).unwrap();
    assert_eq!(p, expected);
}

#[test]
fn bell_marginal_is_maximally_mixed() {
    let rho = DensityMatrix::from_pure(&bell());
    let r = rho.partial_trace(&["A"]).unwrap();
    assert!(max_abs_diff(r.matrix(), &(CMatrix::identity(2, 2) * c(0.5))) < 1e-15);
}

#[test]
fn partial_trace_of_product() {
    let mut rng = stream(11, 0);
    let a = random_density(&mut rng, &qubit("A"));
    let b = random_density(&mut rng, &RegisterLayout::new([("B", 3)]).unwrap());
    let ab = a.tensor(&b).unwrap();
    assert!(ab.partial_trace(&["A"]).unwrap().max_entry_distance(&a).unwrap() < 1e-12);
    assert!(ab.partial_trace(&["B"]).unwrap().max_entry_distance(&b).unwrap() < 1e-12);
}

#[test]
fn partial_trace_of_basis_projector() {
    let l = RegisterLayout::qubits(&["A", "B"]).unwrap();
    let rho = DensityMatrix::basis(l, 1).unwrap();
    let kept = rho.partial_trace(&["B"]).unwrap();
    assert_eq!(kept, DensityMatrix::basis(qubit("B"), 1).unwrap());
}

#[test]
fn partial_trace_rejects_unknown_label() {
    let rho = DensityMatrix::maximally_mixed(qubit("A"));
    assert!(matches!(rho.partial_trace(&["Z"]), Err(crate::Error::Layout(_))));
    let none: [&str; 0] = [];
    assert!(rho.partial_trace(&none).is_err());
}

#[test]
fn partial_trace_keeps_layout_order() {
    let mut rng = stream(12, 0);
    let l = RegisterLayout::new([("A", 2), ("B", 3), ("C", 2)]).unwrap();
    let rho = random_density(&mut rng, &l);
    let a = rho.partial_trace(&["C", "A"]).unwrap();
    assert_eq!(a.layout().names(), &["A".to_string(), "C".to_string()]);
    let b = rho.as_operator().reorder(&["C", "A", "B"]).unwrap().partial_trace(&["A", "C"]).unwrap();
    assert_eq!(b.layout().names(), &["C".to_string(), "A".to_string()]);
    let b = b.reorder(&["A", "C"]).unwrap();
    assert!(b.max_entry_distance(a.as_operator()).unwrap() < 1e-12);
}

#[test]
fn born_probabilities() {
    let z0 = MeasurementOperator::projector(&PureState::basis(qubit("A"), 0).unwrap());
    let mixed = DensityMatrix::maximally_mixed(qubit("A"));
    assert!((born_probability(&z0, &mixed).unwrap() - 0.5).abs() < 1e-15);
    let p = MeasurementOperator::projector(&plus("A"));
    let zero = DensityMatrix::basis(qubit("A"), 0).unwrap();
    assert!((born_probability(&p, &zero).unwrap() - 0.5).abs() < 1e-15);
    // ½(|0⟩⟨0| + |−⟩⟨−|) on |0⟩: ½(1 + ½) by hand.
    let m = Operator::new(
        qubit("A"),
        (z0.matrix() + minus("A").projector().matrix()) * c(0.5),
    )
    .unwrap();
    let m = MeasurementOperator::new(m).unwrap();
    assert!((born_probability(&m, &zero).unwrap() - 0.75).abs() < 1e-15);
    let other = DensityMatrix::basis(qubit("B"), 0).unwrap();
    assert!(born_probability(&m, &other).is_err());
}

#[test]
fn partial_transpose_of_bell_has_negative_half() {
    let rho = DensityMatrix::from_pure(&bell());
    let pt = rho.partial_transpose("B").unwrap();
    // PT of |β⟩⟨β| is SWAP/2 with spectrum {½, ½, ½, -½}.
    let mut swap = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        swap[(i, j)] = c(0.5);
    }
    assert!(max_abs_diff(pt.matrix(), &swap) < 1e-15);
    assert!((pt.eig().unwrap().min() + 0.5).abs() < 1e-12);
}

#[test]
fn partial_transpose_of_product_stays_psd() {
    let mut rng = stream(13, 0);
    let a = random_density(&mut rng, &qubit("A"));
    let b = random_density(&mut rng, &qubit("B"));
    let pt = a.tensor(&b).unwrap().partial_transpose("B").unwrap();
    let bt = Operator::new(qubit("B"), b.matrix().transpose()).unwrap();
    let expected = a.as_operator().tensor(&bt).unwrap();
    assert!(pt.max_entry_distance(&expected).unwrap() < 1e-15);
    assert!(pt.eig().unwrap().min() > -1e-12);
    assert!(pt.hermiticity_error() < 1e-15);

    let id = DensityMatrix::maximally_mixed(RegisterLayout::qubits(&["A", "B"]).unwrap());
    assert_eq!(id.partial_transpose("A").unwrap(), *id.as_operator());
    assert!(id.partial_transpose("Q").is_err());
}

#[test]
fn density_validation() {
    let l = qubit("A");
    let bad_trace = CMatrix::identity(2, 2);
    assert!(DensityMatrix::from_matrix(l.clone(), bad_trace).is_err());
    let not_psd = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5), c(-0.5)]));
    assert!(DensityMatrix::from_matrix(l.clone(), not_psd).is_err());
    let mut not_herm = CMatrix::identity(2, 2) * c(0.5);
    not_herm[(0, 1)] = c(0.1);
    assert!(DensityMatrix::from_matrix(l, not_herm).is_err());
}

#[test]
fn measurement_validation() {
    let l = qubit("A");
    assert!(MeasurementOperator::from_matrix(l.clone(), CMatrix::identity(2, 2) * c(1.1)).is_err());
    assert!(MeasurementOperator::from_matrix(l.clone(), CMatrix::identity(2, 2) * c(-0.1)).is_err());
    let half = MeasurementOperator::from_matrix(l.clone(), CMatrix::identity(2, 2) * c(0.5)).unwrap();
    assert!(Povm::new(vec![half.clone()]).is_err());
    assert!(Povm::new(vec![half.clone(), half]).is_ok());
}

#[test]
fn random_hermitian_reconstructs() {
    let mut rng = stream(14, 0);
    for n in [1usize, 2, 3, 5, 8, 16] {
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, n);
            let e = hermitian_eig(&h).unwrap();
            assert!(max_abs_diff(&e.reconstruct(), &h) < 1e-9);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            for (a, va) in e.vectors.iter().enumerate() {
                for (b, vb) in e.vectors.iter().enumerate() {
                    let ip = va.dotc(vb).norm();
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert!((ip - expected).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn partial_trace_preserves_trace_on_random_states() {
    let mut rng = stream(15, 0);
    let l = RegisterLayout::new([("A", 2), ("B", 3), ("C", 2)]).unwrap();
    for _ in 0..100 {
        let rho = random_density(&mut rng, &l);
        for keep in [vec!["A"], vec!["B"], vec!["A", "C"], vec!["B", "C"]] {
            let r = rho.partial_trace(&keep).unwrap();
            assert!((r.as_operator().trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn partial_trace_is_linear() {
    let mut rng = stream(16, 0);
    let l = RegisterLayout::qubits(&["A", "B"]).unwrap();
    let a = random_density(&mut rng, &l);
    let b = random_density(&mut rng, &l);
    let mix = Operator::new(l, a.matrix() * c(0.3) + b.matrix() * c(0.7)).unwrap();
    let lhs = mix.partial_trace(&["A"]).unwrap();
    let rhs = a.partial_trace(&["A"]).unwrap().matrix() * c(0.3)
        + b.partial_trace(&["A"]).unwrap().matrix() * c(0.7);
    assert!(max_abs_diff(lhs.matrix(), &rhs) < 1e-14);
}

#[test]
fn born_probabilities_over_povm_sum_to_one() {
    let mut rng = stream(17, 0);
    let l = RegisterLayout::new([("A", 3)]).unwrap();
    for k in 1..6 {
        let povm = random_povm(&mut rng, &l, k);
        let rho = DensityMatrix::from_pure(&random_state(&mut rng, &l));
        let total: f64 = povm.probabilities(&rho).unwrap().iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn embed_matches_tensor_with_identity() {
    let mut rng = stream(18, 0);
    let l = RegisterLayout::new([("A", 2), ("B", 3)]).unwrap();
    let h = random_hermitian(&mut rng, 2);
    let op = Operator::new(qubit("A"), h).unwrap();
    let id = Operator::identity(RegisterLayout::new([("B", 3)]).unwrap());
    assert_eq!(op.embed(&l).unwrap(), op.tensor(&id).unwrap());
    let swapped = RegisterLayout::new([("B", 3), ("A", 2)]).unwrap();
    let e = op.embed(&swapped).unwrap();
    assert!(e.max_entry_distance(&id.tensor(&op).unwrap()).unwrap() < 1e-15);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn tensor_then_trace_round_trips(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
            let mut rng = stream(seed, 0);
            let a = random_density(&mut rng, &RegisterLayout::new([("A", da)]).unwrap());
            let b = random_density(&mut rng, &RegisterLayout::new([("B", db)]).unwrap());
            let back = a.tensor(&b).unwrap().partial_trace(&["A"]).unwrap();
            prop_assert!(back.max_entry_distance(&a).unwrap() < 1e-12);
        }

        #[test]
        fn eig_reconstructs(seed in any::<u64>(), n in 1usize..12) {
            let mut rng = stream(seed, 1);
            let h = random_hermitian(&mut rng, n);
            let e = hermitian_eig(&h).unwrap();
            prop_assert!(max_abs_diff(&e.reconstruct(), &h) < 1e-9);
        }
    }
}
