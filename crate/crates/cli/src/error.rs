use std::path::PathBuf;

use minmove_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed config: {0}")]
    Parse(String),

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{key}`: {message}")]
    Invalid { key: String, message: String },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 2 for configuration and I/O problems, 3 for solver failures, 4 for
    /// numerical blowup.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => core_code(e),
            _ => 2,
        }
    }
}

fn core_code(e: &CoreError) -> i32 {
    match e {
        CoreError::SolverFailure { .. } => 3,
        CoreError::Blowup { .. } | CoreError::Numeric(_) => 4,
        CoreError::Study { source, .. } => core_code(source),
        CoreError::Config(_) | CoreError::Domain(_) | CoreError::HypothesisViolated { .. } => 2,
    }
}
