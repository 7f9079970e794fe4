use std::path::PathBuf;

/// Failure modes of a CLI run, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, malformed values, or `n < 2k`.
    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Compute(#[from] conflab_core::Error),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 for usage problems, 3 for domain, resolution and IO errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(conflab_core::Error::Parse { .. }) => 2,
            _ => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
