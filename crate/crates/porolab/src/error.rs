use std::path::PathBuf;

use porolab_core::PoroError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("unknown experiment `{0}`; run `porolab list`")]
    UnknownExperiment(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] PoroError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("report `{0}` has no rows")]
    EmptyReport(String),
}

impl LabError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        // 1 is reserved for a failed verdict
        match self {
            LabError::UnknownExperiment(_) | LabError::Config(_) | LabError::Core(_) => 2,
            LabError::Io { .. } | LabError::EmptyReport(_) => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }
}

pub type LabResult<T> = Result<T, LabError>;
