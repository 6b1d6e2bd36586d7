use std::io;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },

    #[error(transparent)]
    Lib(#[from] mubqct::Error),
}

impl CliError {
    /// 0 ok, 1 usage, 2 verification failure, 3 capability cap, 4 I/O.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Verification(_) => 2,
            CliError::Lib(mubqct::Error::Capability { .. }) => 3,
            CliError::Lib(_) => 1,
            CliError::Io { .. } => 4,
        })
    }

    pub fn io(path: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
