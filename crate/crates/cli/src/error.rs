use std::path::PathBuf;

use chiralforce_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 0 ok, 1 usage, 2 physics, 3 numerical non-convergence.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Core(CoreError::NoConvergence { .. } | CoreError::Overflow(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}
