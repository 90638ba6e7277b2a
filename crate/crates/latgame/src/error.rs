//! Harness-level failures and their process exit codes.

use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    /// A config file line that could not be parsed.
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    /// Structurally valid config that does not describe a runnable
    /// experiment (missing or contradictory keys, bad ranges).
    #[error("{0}")]
    Config(String),
    /// The experiment requires a lattice dimension this mode cannot use.
    #[error("dimension {0} is not supported by this experiment")]
    UnsupportedDimension(usize),
    #[error(transparent)]
    Core(#[from] latgame_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl HarnessError {
    /// Process exit code for this failure: 1 for configuration problems,
    /// 3 for runtime and I/O failures. (Exit code 2 is reserved for a
    /// verification suite that ran and found violations, which is not an
    /// error value.)
    pub fn exit_code(&self) -> u8 {
        match self {
            HarnessError::Parse { .. }
            | HarnessError::Config(_)
            | HarnessError::UnsupportedDimension(_) => 1,
            HarnessError::Core(_) | HarnessError::Io { .. } => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
