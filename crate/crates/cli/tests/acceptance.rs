//! Acceptance suite: one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use qiplab::channels::{
    check_eb_ppt, choi, eb_from_separable_choi, Channel, KrausChannel, PptVerdict,
};
use qiplab::optimize::{
    exact_classical_response_value, majority_amplify, nexp_decide, seesaw_entangled_value,
    subsampling_experiment, uniform_weights, OptimizerConfig, Verdict,
};
use qiplab::protocol::instances::{random_protocol, random_raw_prover};
use qiplab::protocol::{
    acceptance_probability, canonicalize_prover, challenge_distribution, chsh_family, chsh_protocol,
    postselected_acceptance, ClassicalResponseProver, ProverStrategy, Rounds,
};
use qiplab::qmath::{born_probability, max_abs_diff, CMatrix, MeasurementOperator, RegisterLayout, Tensor, C64};
use qiplab::random::{
    random_density, random_eb_channel, random_effect, random_kraus_channel, random_separable_terms,
};
use qiplab::rng::stream;

const TSIRELSON: f64 = 0.853_553_390_593_273_8;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    o.detail = format!("{}; {:.2}s (limit {}s)", o.detail, elapsed.as_secs_f64(), limit.as_secs());
    o.pass &= elapsed < limit;
    o
}

fn qubit(label: &str) -> RegisterLayout {
    RegisterLayout::qubits(&[label]).unwrap()
}

fn chsh_unentangled() -> Outcome {
    timed(Duration::from_secs(1), || {
        let v = exact_classical_response_value(&chsh_family(), &uniform_weights(2)).unwrap().value;
        outcome((v - 0.75).abs() <= 1e-9, format!("value {v:.12}"))
    })
}

fn chsh_entangled() -> Outcome {
    timed(Duration::from_secs(5), || {
        let cfg = OptimizerConfig { restarts: 16, seed: 7, ..Default::default() };
        let v = seesaw_entangled_value(&chsh_family(), &uniform_weights(2), &cfg).unwrap().value;
        outcome(
            (TSIRELSON - 1e-4..=TSIRELSON + 1e-6).contains(&v),
            format!("value {v:.12}, cos²(π/8) = {TSIRELSON:.12}"),
        )
    })
}

fn canonicalization() -> Outcome {
    timed(Duration::from_secs(60), || {
        let mut worst = f64::INFINITY;
        let mut failures = 0;
        for i in 0..200 {
            let mut rng = stream(300, i);
            let spec = random_protocol(&mut rng, Rounds::Three, vec![false; 3]).unwrap();
            let prover: ProverStrategy = random_raw_prover(&mut rng, spec.message()).unwrap().into();
            let raw = acceptance_probability(&spec, &prover).unwrap();
            let canonical = canonicalize_prover(&spec, &prover).unwrap().prover;
            let after = acceptance_probability(&spec, &canonical.into()).unwrap();
            worst = worst.min(after - raw);
            if after < raw - 1e-9 {
                failures += 1;
            }
        }
        outcome(failures == 0, format!("{failures} violations in 200, min gain {worst:.3e}"))
    })
}

fn eb_choi() -> Outcome {
    let q = qubit("A");
    let id = check_eb_ppt(&KrausChannel::identity(q.clone())).unwrap();
    let a = (id.min_pt_eigenvalue + 0.5).abs() <= 1e-10 && id.verdict == PptVerdict::Npt;
    let mut min_eb = f64::INFINITY;
    for i in 0..100 {
        let ch = random_eb_channel(&mut stream(400, i), &q, &q, 1 + (i as usize % 4));
        min_eb = min_eb.min(check_eb_ppt(&ch).unwrap().min_pt_eigenvalue);
    }
    let b = min_eb >= -1e-10;
    let mut worst = 0.0f64;
    for i in 0..50 {
        let mut rng = stream(401, i);
        let terms = random_separable_terms(&mut rng, &q, &qubit("B"), 2 + (i as usize % 4));
        let ch = eb_from_separable_choi(2, &terms).unwrap();
        let target = terms.iter().fold(CMatrix::zeros(4, 4), |acc, t| {
            acc + t.v.projector().tensor(&t.w.projector()).unwrap().matrix() * C64::from(t.p)
        });
        worst = worst.max(max_abs_diff(choi(&ch).unwrap().state().matrix(), &target));
    }
    let c = worst <= 1e-9;
    outcome(
        a && b && c,
        format!(
            "(a) identity min PT eigenvalue {:.12}; (b) min over 100 EB channels {min_eb:.3e}; (c) worst Choi distance {worst:.3e}",
            id.min_pt_eigenvalue
        ),
    )
}

fn adjoint_duality() -> Outcome {
    let mut worst_dual = 0.0f64;
    let mut worst_unital = 0.0f64;
    for i in 0..100 {
        let mut rng = stream(500, i);
        let a = RegisterLayout::new([("A", 2 + (i as usize % 2))]).unwrap();
        let b = RegisterLayout::new([("B", 2 + (i as usize / 2 % 2))]).unwrap();
        let ch = random_kraus_channel(&mut rng, &a, &b, 2 + (i as usize % 3));
        let e = random_effect(&mut rng, &b);
        let rho = random_density(&mut rng, &a);
        let lhs = born_probability(&e, &ch.apply(&rho).unwrap()).unwrap();
        let rhs = born_probability(&ch.adjoint_apply(&e).unwrap(), &rho).unwrap();
        worst_dual = worst_dual.max((lhs - rhs).abs());
        let unit = ch.adjoint_apply(&MeasurementOperator::identity(b.clone())).unwrap();
        worst_unital = worst_unital.max(max_abs_diff(unit.matrix(), &CMatrix::identity(a.total_dim(), a.total_dim())));
    }
    outcome(
        worst_dual <= 1e-10 && worst_unital <= 1e-10,
        format!("worst duality gap {worst_dual:.3e}, worst |Ψ*(I) − I| {worst_unital:.3e}"),
    )
}

fn postselection() -> Outcome {
    let m = qubit("M");
    let labels = m.basis_labels();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let mut rng = stream(600, i);
        let spec = random_protocol(&mut rng, Rounds::Two, vec![true, true]).unwrap();
        let g = [(i as usize) % 2, (i as usize / 2) % 2];
        let dist = challenge_distribution(&spec).unwrap();
        let total: f64 = dist
            .iter()
            .enumerate()
            .map(|(y, (label, p))| p * postselected_acceptance(&spec, label, &labels[g[y]]).unwrap())
            .sum();
        let prover = ClassicalResponseProver::from_indices(None, &m, &g).unwrap();
        let direct = acceptance_probability(&spec, &prover.into()).unwrap();
        worst = worst.max((total - direct).abs());
    }
    outcome(worst <= 1e-9, format!("worst total-probability gap {worst:.3e} over 50 instances"))
}

fn subsampling() -> Outcome {
    timed(Duration::from_secs(30), || {
        let fam = chsh_family();
        let main = subsampling_experiment(&fam, 256, 0.1, 100, 1).unwrap();
        let mut pass = main.failure_fraction <= 0.05;
        let mut means = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for r in [8, 16, 32, 64, 128] {
            let rep = subsampling_experiment(&fam, r, 0.1, 100, 1).unwrap();
            let (mean, se) = (rep.mean_deviation(), rep.standard_error());
            if let Some((pm, pse)) = prev {
                pass &= mean <= pm + 2.0 * (se * se + pse * pse).sqrt();
            }
            prev = Some((mean, se));
            means.push(format!("{r}:{mean:.4}"));
        }
        outcome(
            pass,
            format!(
                "failure fraction {} at r = 256; mean deviation {}",
                main.failure_fraction,
                means.join(" ")
            ),
        )
    })
}

fn nexp() -> Outcome {
    let (spec, _) = chsh_protocol();
    let cfg = OptimizerConfig { net_resolution: 2000, ..Default::default() };
    let yes = nexp_decide(&spec, 0.8, 0.6, &cfg).unwrap();
    let no = nexp_decide(&spec, 1.0, 0.6, &cfg).unwrap();
    outcome(
        yes.verdict == Verdict::Accept && no.verdict == Verdict::Reject && yes.net_error < 0.05,
        format!(
            "(0.8, 0.6) → {}, (1.0, 0.6) → {}, value {:.6}, net error {:.6}",
            yes.verdict.as_str(),
            no.verdict.as_str(),
            yes.value,
            yes.net_error
        ),
    )
}

/// Exact majority tail for p = a/b as a decimal with 30 fractional digits.
fn binomial_oracle(a: u64, b: u64, k: u32) -> f64 {
    let mut num = BigUint::from(0u32);
    let mut binom = BigUint::from(1u32);
    for j in 0..=k {
        if j > 0 {
            binom = binom * BigUint::from(k - j + 1) / BigUint::from(j);
        }
        if j > k / 2 {
            num += &binom * BigUint::from(a).pow(j) * BigUint::from(b - a).pow(k - j);
        }
    }
    let scaled = num * BigUint::from(10u32).pow(30) / BigUint::from(b).pow(k);
    scaled.to_string().parse::<f64>().unwrap() / 1e30
}

fn amplification() -> Outcome {
    let v = majority_amplify(2.0 / 3.0, 41).unwrap();
    let oracle = binomial_oracle(2, 3, 41);
    let half = majority_amplify(0.5, 41).unwrap();
    outcome(
        v >= 0.8985 && (v - oracle).abs() <= 1e-12 && (half - 0.5).abs() <= 1e-12,
        format!("p = 2/3: {v:.15} (oracle {oracle:.15}); p = 1/2: {half:.15}"),
    )
}

const CLI_RUNS: [&[&str]; 7] = [
    &["chsh-gap", "--restarts", "16", "--seed", "7"],
    &["canonicalize", "--seed", "5"],
    &["eb-check", "--instance", "random-eb", "--seed", "3"],
    &["nexp-decide", "--c", "0.8", "--s", "0.6", "--resolution", "2000"],
    &["subsample", "--family", "chsh", "--r", "256", "--eps", "0.1", "--trials", "100", "--seed", "1"],
    &["subsample", "--family", "random", "--r", "32", "--trials", "50", "--seed", "4"],
    &["amplify", "--p", "0.6666666666666666", "--k", "41"],
];

fn determinism() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("run.json");
    std::fs::write(&config, r#"{"command": "canonicalize", "seed": 11}"#).unwrap();
    let config = config.to_str().unwrap().to_string();
    let run_args = ["run", "--config", config.as_str()];
    let runs: Vec<&[&str]> = CLI_RUNS.iter().copied().chain([&run_args[..]]).collect();
    let mut mismatches = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for threads in ["1", "2", "8"] {
            let path = dir.join(format!("run{i}-t{threads}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_qiplab"))
                .args(*args)
                .arg("--out")
                .arg(&path)
                .env("LAB_THREADS", threads)
                .output()
                .unwrap();
            if !status.status.success() {
                mismatches.push(format!("{} failed with {}", args[0], status.status));
                break;
            }
            outputs.push(std::fs::read(&path).unwrap());
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            mismatches.push(args[0].to_string());
        }
    }
    outcome(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{} command configurations identical under 1, 2 and 8 workers", runs.len())
        } else {
            format!("differences: {}", mismatches.join(", "))
        },
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("CHSH unentangled value", chsh_unentangled),
        ("CHSH entangled value", chsh_entangled),
        ("canonicalization monotonicity", canonicalization),
        ("EB/Choi suite", eb_choi),
        ("adjoint duality", adjoint_duality),
        ("postselection consistency", postselection),
        ("subsampling decay", subsampling),
        ("threshold decision", nexp),
        ("amplification arithmetic", amplification),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
