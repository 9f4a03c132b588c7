use proptest::prelude::*;

use qiplab::channels::{channels_equal, choi, Channel, DEFAULT_CHANNEL_TOL};
use qiplab::doc::{protocol_from_json, protocol_to_json, strategy_from_json, strategy_to_json};
use qiplab::optimize::{
    brute_force_unentangled_value, exact_classical_response_value, seesaw_entangled_value,
    uniform_weights, OptimizerConfig, Witness,
};
use qiplab::protocol::instances::{
    family_protocol, random_entangled_prover, random_family, random_protocol,
    random_public_coin_protocol, random_raw_prover,
};
use qiplab::protocol::{
    acceptance_by_coin_mixture, acceptance_probability, canonicalize_prover, chsh_protocol,
    ClassicalResponseProver, MeasurementFamily, ProverStrategy, Rounds,
};
use qiplab::qmath::{max_abs_diff, RegisterLayout};
use qiplab::random::random_eb_channel;
use qiplab::rng::stream;

fn message() -> RegisterLayout {
    RegisterLayout::qubits(&["M"]).unwrap()
}

fn families_agree(a: &MeasurementFamily, b: &MeasurementFamily) -> f64 {
    let mut worst = 0.0f64;
    for y in 0..a.challenges().len() {
        for z in 0..a.responses().len() {
            worst = worst.max(max_abs_diff(a.get(y, z).matrix(), b.get(y, z).matrix()));
        }
    }
    worst
}

#[test]
fn exact_witness_replays_through_the_simulator() {
    for i in 0..10 {
        let fam = random_family(&mut stream(20, i), &message());
        let report = exact_classical_response_value(&fam, &uniform_weights(2)).unwrap();
        let Witness::ClassicalResponse { psi, responses } = report.witness else {
            panic!("exact solver returns a classical witness");
        };
        let spec = family_protocol(&fam, Rounds::Three).unwrap();
        let prover = ClassicalResponseProver::from_indices(psi, &message(), &responses).unwrap();
        let simulated = acceptance_probability(&spec, &prover.into()).unwrap();
        assert!((simulated - report.value).abs() < 1e-10, "{simulated} vs {}", report.value);
    }
}

#[test]
fn family_survives_protocol_compilation() {
    let fam = random_family(&mut stream(21, 0), &message());
    let spec = family_protocol(&fam, Rounds::Three).unwrap();
    let recovered = MeasurementFamily::from_public_coin_protocol(&spec).unwrap();
    assert!(families_agree(&fam, &recovered) < 1e-12);
}

#[test]
fn documents_preserve_acceptance() {
    for i in 0..5 {
        let mut rng = stream(22, i);
        let spec = random_protocol(&mut rng, Rounds::Three, vec![false, false, false]).unwrap();
        let prover: ProverStrategy = random_entangled_prover(&mut rng, spec.message(), Rounds::Three)
            .unwrap();
        let spec2 = protocol_from_json(&protocol_to_json(&spec)).unwrap();
        let prover2 = strategy_from_json(&strategy_to_json(&prover)).unwrap();
        let a = acceptance_probability(&spec, &prover).unwrap();
        let b = acceptance_probability(&spec2, &prover2).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn brute_force_brackets_the_chsh_value() {
    let (spec, _) = chsh_protocol();
    let cfg = OptimizerConfig { net_resolution: 400, ..Default::default() };
    let report = brute_force_unentangled_value(&spec, &cfg).unwrap();
    let err = report.net_error.unwrap();
    assert!(report.value <= 0.75 + 1e-9);
    assert!(report.value >= 0.75 - 2.0 * err, "{} with net error {err}", report.value);
}

#[test]
fn entangled_value_dominates_classical_on_random_families() {
    let cfg = OptimizerConfig { restarts: 16, seed: 3, ..Default::default() };
    for i in 0..5 {
        let fam = random_family(&mut stream(23, i), &message());
        let w = uniform_weights(2);
        let classical = exact_classical_response_value(&fam, &w).unwrap().value;
        let entangled = seesaw_entangled_value(&fam, &w, &cfg).unwrap().value;
        assert!(entangled >= classical - 1e-6, "{entangled} < {classical}");
    }
}

#[test]
fn eb_kraus_form_has_the_same_choi_state() {
    for i in 0..10 {
        let ch = random_eb_channel(&mut stream(24, i), &message(), &message(), 3);
        let k = ch.to_kraus();
        assert!(channels_equal(&ch, &k, DEFAULT_CHANNEL_TOL).unwrap());
        assert!((choi(&k).unwrap().state().matrix().trace().re - 1.0).abs() < 1e-12);
        assert_eq!(k.in_layout(), ch.in_layout());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonicalization_never_loses(seed in any::<u64>()) {
        let mut rng = stream(seed, 0);
        let spec = random_protocol(&mut rng, Rounds::Three, vec![false, false, false]).unwrap();
        let prover: ProverStrategy = random_raw_prover(&mut rng, spec.message()).unwrap().into();
        let raw = acceptance_probability(&spec, &prover).unwrap();
        let canonical = canonicalize_prover(&spec, &prover).unwrap().prover;
        let after = acceptance_probability(&spec, &canonical.into()).unwrap();
        prop_assert!(after >= raw - 1e-9);
    }

    #[test]
    fn coin_mixture_matches_coherent_coin(seed in any::<u64>()) {
        let mut rng = stream(seed, 1);
        let spec = random_public_coin_protocol(&mut rng, Rounds::Three).unwrap();
        let prover = random_entangled_prover(&mut rng, spec.message(), Rounds::Three).unwrap();
        let coherent = acceptance_probability(&spec, &prover).unwrap();
        let mixture = acceptance_by_coin_mixture(&spec, &prover).unwrap();
        prop_assert!((coherent - mixture).abs() < 1e-10);
    }
}
