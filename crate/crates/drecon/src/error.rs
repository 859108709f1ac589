use std::path::PathBuf;

use drecon_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes, one per error class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum ExitCode {
    Ok = 0,
    Usage = 2,
    Io = 3,
    Parse = 4,
    Mapping = 5,
    Consistency = 6,
    Cap = 7,
    NotBijective = 8,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Core { path: PathBuf, source: CoreError },
    #[error("{path}:{line}: {msg}")]
    Format { path: PathBuf, line: usize, msg: String },
    #[error(transparent)]
    Algorithm(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} instances failed; first: {first}")]
    Batch { failed: usize, total: usize, first: Box<CliError> },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Io { .. } => ExitCode::Io,
            Self::Format { .. } => ExitCode::Parse,
            Self::Usage(_) => ExitCode::Usage,
            Self::Batch { first, .. } => first.exit_code(),
            Self::Core { source, .. } | Self::Algorithm(source) => classify(source),
        }
    }
}

fn classify(e: &CoreError) -> ExitCode {
    match e {
        CoreError::Parse { .. } => ExitCode::Parse,
        CoreError::MissingMapping(_)
        | CoreError::DanglingTarget { .. }
        | CoreError::NotSurjective(_)
        | CoreError::UnknownLeaf(_) => ExitCode::Mapping,
        CoreError::NotBijective(_) => ExitCode::NotBijective,
        CoreError::CapExceeded { .. } => ExitCode::Cap,
        CoreError::InvalidArgument(_) | CoreError::Simulation(_) => ExitCode::Usage,
        _ => ExitCode::Consistency,
    }
}
