use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] ramsey_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error("json encoding: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    /// Field-level validation failure reported by the numerical core.
    pub fn invalid(block: &str, e: ramsey_core::Error) -> Self {
        Self::Config(format!("[{block}] {e}"))
    }

    /// Process exit code: 2 for configuration problems, 3 for numerical
    /// failures, 1 for anything touching the filesystem.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io { .. } | Self::Csv { .. } | Self::Json(_) => 1,
        }
    }
}
