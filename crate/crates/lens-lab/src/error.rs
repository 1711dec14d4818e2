use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("unknown experiment {0:?}; run `lens-lab list` to see the registry")]
    UnknownExperiment(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error(transparent)]
    Core(lens_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl From<lens_core::Error> for LabError {
    fn from(e: lens_core::Error) -> Self {
        match e {
            lens_core::Error::SizeGuard { .. } | lens_core::Error::ResolutionGuard { .. } => {
                LabError::SizeGuard(e.to_string())
            }
            other => LabError::Core(other),
        }
    }
}

impl LabError {
    /// Process exit code: 2 for configuration problems, 3 for size guards.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::SizeGuard(_) => 3,
            _ => 2,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
