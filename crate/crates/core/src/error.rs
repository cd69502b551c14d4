use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("empty spectrum: every eigenvalue fell below the clamp threshold {threshold:.3e}")]
    EmptySpectrum { threshold: f64 },

    #[error(
        "ill-posed cluster: eigenvalue {eigenvalue} lies on the contour |λ - {center}| = {radius}"
    )]
    IllPosedCluster {
        eigenvalue: f64,
        center: f64,
        radius: f64,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("the identity filter has no constant C_alpha")]
    NoBound,

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 1 validation, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Numerical(_) | Error::EmptySpectrum { .. } | Error::IllPosedCluster { .. } => 2,
            Error::Io { .. } | Error::Format { .. } => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
