use std::path::PathBuf;

/// Errors surfaced by the harness and CLI.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] medbw_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn config(msg: impl Into<String>) -> Self {
        LabError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for bad configuration, 3 for numerical
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Numerical(_) => 3,
            LabError::Io { .. } | LabError::Csv { .. } | LabError::Json(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
