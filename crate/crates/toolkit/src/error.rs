use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ToolkitError {
    #[error(transparent)]
    Core(#[from] scenesal_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{0}")]
    Config(String),
    #[error("stage {stage}: {source}")]
    Stage { stage: &'static str, source: Box<ToolkitError> },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, ToolkitError>;

impl ToolkitError {
    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Self::Io { path: path.as_ref().to_path_buf(), source }
    }

    pub fn json(path: impl AsRef<Path>, source: serde_json::Error) -> Self {
        Self::Json { path: path.as_ref().to_path_buf(), source }
    }

    pub fn format(path: impl AsRef<Path>, message: impl Into<String>) -> Self {
        Self::Format { path: path.as_ref().to_path_buf(), message: message.into() }
    }

    /// Attaches a file path to a core error.
    pub fn at(path: impl AsRef<Path>, err: scenesal_core::Error) -> Self {
        Self::format(path, err.to_string())
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            already @ ToolkitError::Stage { .. } => already,
            other => ToolkitError::Stage { stage, source: Box::new(other) },
        }
    }

    /// 1 validation error, 2 IO error, 3 internal invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            ToolkitError::Core(scenesal_core::Error::Invariant(_)) | ToolkitError::Invariant(_) => 3,
            ToolkitError::Io { .. } => 2,
            ToolkitError::Stage { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
