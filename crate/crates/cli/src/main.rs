//! `qiplab`: experiment runner for the unentangled interactive-proof lab.

mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "qiplab", version, about = "Simulate and optimize small unentangled quantum interactive proofs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Invocation {
    /// JSON configuration document, or `-` for standard input.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    flags: ExperimentConfig,
}

#[derive(Subcommand)]
enum Command {
    /// Unentangled versus entangled value of the CHSH family.
    ChshGap(Invocation),
    /// Fold a general unentangled prover into canonical form.
    Canonicalize(Invocation),
    /// Partial-transpose test of a channel's Choi state.
    EbCheck(Invocation),
    /// Threshold decision on the brute-force unentangled value.
    NexpDecide(Invocation),
    /// Subsampling deviation experiment.
    Subsample(Invocation),
    /// Majority-vote amplification probability.
    Amplify(Invocation),
    /// Run the command named in a configuration document.
    Run(Invocation),
}

fn resolve(command: Command) -> Result<(String, ExperimentConfig), CliError> {
    let (name, inv) = match command {
        Command::ChshGap(i) => (Some("chsh-gap"), i),
        Command::Canonicalize(i) => (Some("canonicalize"), i),
        Command::EbCheck(i) => (Some("eb-check"), i),
        Command::NexpDecide(i) => (Some("nexp-decide"), i),
        Command::Subsample(i) => (Some("subsample"), i),
        Command::Amplify(i) => (Some("amplify"), i),
        Command::Run(i) => (None, i),
    };
    let file = match &inv.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let cfg = file.overlay(inv.flags);
    let command = match (name, cfg.command.as_deref()) {
        (Some(n), Some(f)) if n != f => {
            return Err(CliError::Config(format!("configuration names command {f}, not {n}")))
        }
        (Some(n), _) => n.to_string(),
        (None, Some(f)) => f.to_string(),
        (None, None) => return Err(CliError::Config("run needs a configuration naming a command".into())),
    };
    Ok((command, cfg))
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("LAB_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (command, cfg) = resolve(cli.command)?;
    let outcome = commands::run(&command, &cfg)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let write_err = |e: std::io::Error| CliError::Output(e.to_string());
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &outcome.csv).map_err(|e| CliError::Io { path: path.clone(), source: e })?;
            out.write_all(outcome.summary.as_bytes()).map_err(write_err)?;
        }
        None => {
            out.write_all(outcome.csv.as_bytes()).map_err(write_err)?;
            eprint!("{}", outcome.summary);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
