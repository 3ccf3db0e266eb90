use thiserror::Error;

/// Errors raised by the numerical kernels and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix rows must all have length {dim}")]
    Ragged { dim: usize },

    #[error("invalid system size {0}: need 1 <= n_qubits <= {max}", max = crate::spin::MAX_QUBITS)]
    InvalidSystem(usize),

    #[error("site {site} out of range for a {n_qubits}-qubit system")]
    SiteOutOfRange { site: usize, n_qubits: usize },

    #[error("invalid Hamiltonian term: {0}")]
    InvalidTerm(String),

    #[error("conserved operators {first} and {second} do not commute (norm {norm:.3e})")]
    NonCommuting {
        first: String,
        second: String,
        norm: f64,
    },

    #[error("sector decomposition failed validation after {attempts} attempts (residual {residual:.3e})")]
    DecompositionFailed { attempts: usize, residual: f64 },

    #[error("control {index} leaks out of the sector (leakage {leakage:.3e} > {tol:.3e})")]
    LeakyControl { index: usize, leakage: f64, tol: f64 },

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("pulse references control {index} but only {available} controls exist")]
    InvalidControlIndex { index: usize, available: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: String, message: String },

    #[error("{field}: {source}")]
    AtField {
        field: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Stable numeric code reported by the command-line runner as its exit status.
    pub fn code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::Parse { .. } => 3,
            Error::Io { .. } => 4,
            Error::DimensionMismatch { .. } => 5,
            Error::NotHermitian { .. } | Error::NonFinite { .. } | Error::Ragged { .. } => 6,
            Error::InvalidSystem(_) | Error::SiteOutOfRange { .. } => 7,
            Error::InvalidTerm(_) => 8,
            Error::InvalidCode(_) => 9,
            Error::NonCommuting { .. } | Error::DecompositionFailed { .. } => 10,
            Error::LeakyControl { .. } => 11,
            Error::InvalidControlIndex { .. } | Error::InvalidInput(_) => 12,
            Error::AtField { source, .. } => source.code(),
        }
    }

    /// Names the config field an error came from; keeps the inner code.
    pub fn at(self, field: impl Into<String>) -> Self {
        Error::AtField {
            field: field.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
