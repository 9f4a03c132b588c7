use std::path::Path;

use serde::Serialize;

use qiplab::channels::{check_eb_ppt, AnyChannel, KrausChannel, PptVerdict};
use qiplab::doc::{channel_from_json, protocol_from_json, strategy_from_json, strategy_to_json};
use qiplab::optimize::{
    exact_classical_response_value, majority_amplify, nexp_decide, seesaw_entangled_value,
    subsampling_experiment, uniform_weights, OptimizerConfig,
};
use qiplab::protocol::instances::{random_family, random_protocol, random_raw_prover};
use qiplab::protocol::{
    acceptance_probability, always_accept_protocol, canonicalize_prover, chsh_family, chsh_protocol,
    chsh_qcip2_protocol, MeasurementFamily, ProtocolSpec, ProverStrategy, Rounds,
};
use qiplab::qmath::RegisterLayout;
use qiplab::random::{random_eb_channel, random_kraus_channel};
use qiplab::rng::stream;

use crate::config::{read_input, ExperimentConfig};
use crate::error::CliError;
use crate::report::{num, CsvReport};

/// CSV text and a human-readable summary.
pub struct Outcome {
    pub csv: String,
    pub summary: String,
}

pub const COMMANDS: [&str; 6] = ["chsh-gap", "canonicalize", "eb-check", "nexp-decide", "subsample", "amplify"];

pub fn run(command: &str, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let allowed: &[&str] = match command {
        "chsh-gap" => &["seed", "restarts", "max_iters", "tol", "private_dim"],
        "canonicalize" => &["seed", "protocol", "prover", "emit"],
        "eb-check" => &["seed", "channel", "instance"],
        "nexp-decide" => &["seed", "protocol", "c", "s", "resolution"],
        "subsample" => &["seed", "family", "r", "eps", "trials"],
        "amplify" => &["seed", "p", "k"],
        other => {
            return Err(CliError::Config(format!(
                "unknown command {other}; expected one of {}",
                COMMANDS.join(", ")
            )))
        }
    };
    reject_unused(cfg, command, allowed)?;
    match command {
        "chsh-gap" => chsh_gap(cfg),
        "canonicalize" => canonicalize(cfg),
        "eb-check" => eb_check(cfg),
        "nexp-decide" => nexp(cfg),
        "subsample" => subsample(cfg),
        _ => amplify(cfg),
    }
}

fn reject_unused(cfg: &ExperimentConfig, command: &str, allowed: &[&str]) -> Result<(), CliError> {
    let value = serde_json::to_value(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let mut set: Vec<&str> = value
        .as_object()
        .into_iter()
        .flatten()
        .filter(|(k, v)| !v.is_null() && k.as_str() != "command" && !allowed.contains(&k.as_str()))
        .map(|(k, _)| k.as_str())
        .collect();
    if cfg.emit.is_some() && !allowed.contains(&"emit") {
        set.push("emit");
    }
    if let Some(k) = set.first() {
        return Err(CliError::Config(format!("parameter {k} does not apply to {command}")));
    }
    Ok(())
}

fn require<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing parameter {name}")))
}

fn unit_interval(x: f64, name: &str) -> Result<f64, CliError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(CliError::Config(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(x)
}

fn load_protocol(source: &str, seed: u64) -> Result<ProtocolSpec, CliError> {
    Ok(match source {
        "chsh" => chsh_protocol().0,
        "chsh-qcip2" => chsh_qcip2_protocol(),
        "always-accept" => always_accept_protocol(Rounds::Three),
        "random" => random_protocol(&mut stream(seed, 0), Rounds::Three, vec![false; 3])?,
        path => protocol_from_json(&read_input(Path::new(path))?)?,
    })
}

fn load_family(source: &str, seed: u64) -> Result<MeasurementFamily, CliError> {
    Ok(match source {
        "chsh" => chsh_family(),
        "random" => random_family(&mut stream(seed, 0), &RegisterLayout::qubits(&["M"])?),
        path => MeasurementFamily::from_public_coin_protocol(&protocol_from_json(&read_input(Path::new(path))?)?)?,
    })
}

#[derive(Serialize)]
struct ChshGapParams {
    seed: u64,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    private_dim: Option<usize>,
}

fn chsh_gap(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let defaults = OptimizerConfig::default();
    let params = ChshGapParams {
        seed: cfg.seed.unwrap_or(0),
        restarts: cfg.restarts.unwrap_or(defaults.restarts),
        max_iters: cfg.max_iters.unwrap_or(defaults.max_iters),
        tol: cfg.tol.unwrap_or(defaults.convergence_tol),
        private_dim: cfg.private_dim,
    };
    let opt = OptimizerConfig {
        restarts: params.restarts,
        max_iters: params.max_iters,
        convergence_tol: params.tol,
        seed: params.seed,
        private_dim: params.private_dim,
        ..defaults
    };
    opt.validate()?;
    let fam = chsh_family();
    let w = uniform_weights(2);
    let exact = exact_classical_response_value(&fam, &w)?;
    let see = seesaw_entangled_value(&fam, &w, &opt)?;
    let mut csv = CsvReport::new("chsh-gap", &params, &["method", "value", "restarts", "iters"])?;
    csv.row([exact.method.as_str().to_string(), num(exact.value), "1".into(), exact.iterations().to_string()])?;
    csv.row([
        see.method.as_str().to_string(),
        num(see.value),
        params.restarts.to_string(),
        see.iterations().to_string(),
    ])?;
    let summary = format!(
        "unentangled value {:.6}\nentangled value {:.6}\ngap {:.6}\n",
        exact.value,
        see.value,
        see.value - exact.value
    );
    Ok(Outcome { csv: csv.finish()?, summary })
}

#[derive(Serialize)]
struct CanonicalizeParams<'a> {
    seed: u64,
    protocol: &'a str,
    prover: &'a str,
}

fn canonicalize(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let params = CanonicalizeParams {
        seed: cfg.seed.unwrap_or(0),
        protocol: cfg.protocol.as_deref().unwrap_or("random"),
        prover: cfg.prover.as_deref().unwrap_or("random"),
    };
    let spec = load_protocol(params.protocol, params.seed)?;
    let prover: ProverStrategy = match params.prover {
        "random" => random_raw_prover(&mut stream(params.seed, 1), spec.message())?.into(),
        path => strategy_from_json(&read_input(Path::new(path))?)?,
    };
    let raw = acceptance_probability(&spec, &prover)?;
    let result = canonicalize_prover(&spec, &prover)?;
    let canonical: ProverStrategy = result.prover.clone().into();
    let after = acceptance_probability(&spec, &canonical)?;
    if after < raw - 1e-9 {
        return Err(qiplab::Error::Contract(format!(
            "canonical acceptance {after} fell below raw acceptance {raw}"
        ))
        .into());
    }
    let mut csv = CsvReport::new("canonicalize", &params, &["branch", "probability", "acceptance", "selected"])?;
    for (ell, (p, a)) in result
        .branch_probabilities
        .iter()
        .zip(&result.branch_acceptances)
        .enumerate()
    {
        csv.row([
            ell.to_string(),
            num(*p),
            a.map(num).unwrap_or_default(),
            (ell == result.branch).to_string(),
        ])?;
    }
    csv.footer("raw_acceptance", num(raw));
    csv.footer("canonical_acceptance", num(after));
    if let Some(path) = &cfg.emit {
        std::fs::write(path, strategy_to_json(&canonical)).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
    }
    let summary = format!(
        "raw acceptance {raw:.9}\ncanonical acceptance {after:.9}\nselected branch {}\n",
        result.branch
    );
    Ok(Outcome { csv: csv.finish()?, summary })
}

#[derive(Serialize)]
struct EbCheckParams<'a> {
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    channel: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<&'a str>,
}

fn eb_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    if cfg.channel.is_some() && cfg.instance.is_some() {
        return Err(CliError::Config("give either channel or instance, not both".into()));
    }
    let seed = cfg.seed.unwrap_or(0);
    let instance = match (&cfg.channel, &cfg.instance) {
        (None, None) => Some("identity"),
        (_, i) => i.as_deref(),
    };
    let params = EbCheckParams {
        seed,
        channel: cfg.channel.as_deref(),
        instance,
    };
    let qubit = RegisterLayout::qubits(&["A"])?;
    let channel = match (params.channel, params.instance) {
        (Some(path), _) => channel_from_json(&read_input(Path::new(path))?)?,
        (None, Some("identity")) => AnyChannel::Kraus(KrausChannel::identity(qubit)),
        (None, Some("dephasing")) => AnyChannel::Kraus(KrausChannel::dephasing(qubit)),
        (None, Some("random-eb")) => AnyChannel::Eb(random_eb_channel(&mut stream(seed, 0), &qubit, &qubit, 3)),
        (None, Some("random-kraus")) => {
            AnyChannel::Kraus(random_kraus_channel(&mut stream(seed, 0), &qubit, &qubit, 2))
        }
        (None, Some(other)) => {
            return Err(CliError::Config(format!(
                "unknown instance {other}; expected identity, dephasing, random-eb or random-kraus"
            )))
        }
        (None, None) => unreachable!("defaulted above"),
    };
    let report = check_eb_ppt(&channel)?;
    let verdict = match report.verdict {
        PptVerdict::Ppt => "ppt",
        PptVerdict::Npt => "npt",
    };
    let mut csv = CsvReport::new("eb-check", &params, &["form", "min_pt_eigenvalue", "verdict", "certifies_eb"])?;
    csv.row([
        channel.form().to_string(),
        num(report.min_pt_eigenvalue),
        verdict.to_string(),
        report.certifies_eb.to_string(),
    ])?;
    let conclusion = match (report.verdict, report.certifies_eb) {
        (PptVerdict::Npt, _) => "not entanglement breaking",
        (PptVerdict::Ppt, true) => "entanglement breaking",
        (PptVerdict::Ppt, false) => "PPT; separability undecided at this dimension",
    };
    let summary = format!(
        "min partial-transpose eigenvalue {:.6e}\n{conclusion}\n",
        report.min_pt_eigenvalue
    );
    Ok(Outcome { csv: csv.finish()?, summary })
}

#[derive(Serialize)]
struct NexpParams<'a> {
    seed: u64,
    protocol: &'a str,
    c: f64,
    s: f64,
    resolution: usize,
}

fn nexp(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let params = NexpParams {
        seed: cfg.seed.unwrap_or(0),
        protocol: cfg.protocol.as_deref().unwrap_or("chsh"),
        c: unit_interval(require(cfg.c, "c")?, "c")?,
        s: unit_interval(require(cfg.s, "s")?, "s")?,
        resolution: cfg.resolution.unwrap_or(OptimizerConfig::default().net_resolution),
    };
    if params.c <= params.s {
        return Err(CliError::Config(format!("need c > s, got c = {}, s = {}", params.c, params.s)));
    }
    let spec = load_protocol(params.protocol, params.seed)?;
    let opt = OptimizerConfig {
        seed: params.seed,
        net_resolution: params.resolution,
        ..Default::default()
    };
    let d = nexp_decide(&spec, params.c, params.s, &opt)?;
    let mut csv = CsvReport::new("nexp-decide", &params, &["threshold", "value", "net_error", "verdict"])?;
    csv.row([num(d.threshold), num(d.value), num(d.net_error), d.verdict.as_str().to_string()])?;
    let summary = format!(
        "{} (value {:.6} against threshold {:.6}, net error {:.6})\n",
        d.verdict.as_str(),
        d.value,
        d.threshold,
        d.net_error
    );
    Ok(Outcome { csv: csv.finish()?, summary })
}

#[derive(Serialize)]
struct SubsampleParams<'a> {
    seed: u64,
    family: &'a str,
    r: usize,
    eps: f64,
    trials: usize,
}

fn subsample(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let params = SubsampleParams {
        seed: cfg.seed.unwrap_or(0),
        family: cfg.family.as_deref().unwrap_or("chsh"),
        r: cfg.r.unwrap_or(256),
        eps: cfg.eps.unwrap_or(0.1),
        trials: cfg.trials.unwrap_or(100),
    };
    let fam = load_family(params.family, params.seed)?;
    let rep = subsampling_experiment(&fam, params.r, params.eps, params.trials, params.seed)?;
    let mut csv = CsvReport::new("subsample", &params, &["trial", "r", "lhs", "rhs", "deviation"])?;
    for t in &rep.trials {
        csv.row([t.trial.to_string(), rep.r.to_string(), num(rep.lhs), num(t.rhs), num(t.deviation)])?;
    }
    csv.footer("failure_fraction", num(rep.failure_fraction));
    csv.footer("eps", num(rep.eps));
    let summary = format!(
        "mean deviation {:.6} (standard error {:.6})\nfailure fraction {:.4} at eps {}\n",
        rep.mean_deviation(),
        rep.standard_error(),
        rep.failure_fraction,
        rep.eps
    );
    Ok(Outcome { csv: csv.finish()?, summary })
}

#[derive(Serialize)]
struct AmplifyParams {
    seed: u64,
    p: f64,
    k: usize,
}

fn amplify(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let params = AmplifyParams {
        seed: cfg.seed.unwrap_or(0),
        p: unit_interval(require(cfg.p, "p")?, "p")?,
        k: require(cfg.k, "k")?,
    };
    let v = majority_amplify(params.p, params.k)?;
    let mut csv = CsvReport::new("amplify", &params, &["p", "k", "probability"])?;
    csv.row([num(params.p), params.k.to_string(), num(v)])?;
    Ok(Outcome {
        csv: csv.finish()?,
        summary: format!("majority success probability {v:.12}\n"),
    })
}
