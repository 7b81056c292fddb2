use std::path::{Path, PathBuf};

use holonomy_core::LabError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("data mismatch: {0}")]
    Mismatch(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error(transparent)]
    Lab(#[from] LabError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// 2 for bad input, 3 for mismatched data, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Mismatch(_) => 3,
            CliError::Tolerance(_) => 4,
            CliError::Lab(e) => match e {
                LabError::KeyMismatch(_) => 3,
                LabError::InvalidSchottky(_)
                | LabError::ModelConstructionFailed(_)
                | LabError::InvalidWord(_)
                | LabError::EmptyClass
                | LabError::RankMismatch(_)
                | LabError::NonPrimitiveClass(_)
                | LabError::InvalidBump(_)
                | LabError::InvalidArgument(_)
                | LabError::InvalidRepresentation(_) => 2,
                _ => 4,
            },
        }
    }
}
