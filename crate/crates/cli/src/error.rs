use std::path::PathBuf;

use newton_atlas::classify::ClassifyError;
use newton_atlas::newton::NewtonError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{path}: {polynomial} coefficient {index} has {len} terms; family coefficients must be affine in c (1 or 2 terms)")]
    NonAffine {
        path: PathBuf,
        polynomial: &'static str,
        index: usize,
        len: usize,
    },
    #[error("{0}")]
    Degenerate(NewtonError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) | CliError::Config { .. } | CliError::NonAffine { .. } => 2,
            CliError::Degenerate(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<NewtonError> for CliError {
    fn from(e: NewtonError) -> Self {
        CliError::Degenerate(e)
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::NotPolynomialNewton
            | ClassifyError::NotParabolic
            | ClassifyError::UnknownBasin { .. }
            | ClassifyError::NotSuperattracting { .. }
            | ClassifyError::RayIndexOutOfRange { .. }
            | ClassifyError::DuplicateBasin { .. }
            | ClassifyError::UnknownRay { .. }
            | ClassifyError::MarkingSize { .. } => CliError::Usage(e.to_string()),
            ClassifyError::Newton(n) => CliError::Degenerate(n),
            other => CliError::Failed(other.to_string()),
        }
    }
}
