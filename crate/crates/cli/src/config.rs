use std::io::Read;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Experiment parameters shared by every command.
///
/// Values come from a JSON document (`--config`, or `-` for standard
/// input) and are overridden by flags given on the command line.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Command to run; only read from configuration documents.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Dimension of the entangled prover's kept register.
    #[arg(long)]
    pub private_dim: Option<usize>,
    /// Number of points in the ε-net over first messages.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Sample count per subsampling trial.
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// `chsh`, `random`, or a protocol document path.
    #[arg(long)]
    pub family: Option<String>,
    /// Completeness parameter.
    #[arg(long)]
    pub c: Option<f64>,
    /// Soundness parameter.
    #[arg(long)]
    pub s: Option<f64>,
    /// `chsh`, `chsh-qcip2`, `always-accept`, `random`, or a protocol document path.
    #[arg(long)]
    pub protocol: Option<String>,
    /// `random` or a strategy document path.
    #[arg(long)]
    pub prover: Option<String>,
    /// Channel document path.
    #[arg(long)]
    pub channel: Option<String>,
    /// Built-in channel: `identity`, `dephasing`, `random-eb` or `random-kraus`.
    #[arg(long)]
    pub instance: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// CSV destination; without it the CSV goes to standard output.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    /// Where `canonicalize` writes the canonical prover document.
    #[arg(long)]
    #[serde(skip_serializing)]
    pub emit: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        ExperimentConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl ExperimentConfig {
    /// Values from `flags` take precedence over `self`.
    pub fn overlay(self, flags: ExperimentConfig) -> ExperimentConfig {
        let base = self;
        overlay!(base, flags; command, seed, restarts, max_iters, tol, private_dim, resolution,
            r, eps, trials, family, c, s, protocol, prover, channel, instance, p, k, out, emit)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = read_input(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Reads a file, or standard input when the path is `-`.
pub fn read_input(path: &Path) -> Result<String, CliError> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}
