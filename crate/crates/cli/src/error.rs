use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("cannot write report: {0}")]
    Output(String),

    #[error(transparent)]
    Lib(#[from] qiplab::Error),
}

impl CliError {
    /// 2 for bad input or unsupported instances, 3 for numeric or contract failures.
    pub fn exit_code(&self) -> i32 {
        use qiplab::Error as E;
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Output(_) => 3,
            CliError::Lib(e) => match e {
                E::Contract(_) => 3,
                E::Layout(_)
                | E::Validation(_)
                | E::Decomposition(_)
                | E::ShapeMismatch(_)
                | E::Classicality(_)
                | E::Conditioning { .. }
                | E::Unsupported(_)
                | E::BudgetExceeded { .. }
                | E::InsufficientResolution { .. }
                | E::Document(_) => 2,
            },
        }
    }
}
