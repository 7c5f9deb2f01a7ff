use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector of length {0} cannot be reshaped into a square operator")]
    NotSquareLength(usize),

    #[error("{what} is not Hermitian (defect {defect:.3e})")]
    NotHermitian { what: String, defect: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid rate for {what}: {value}")]
    InvalidRate { what: String, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid dephasing matrix: {0}")]
    InvalidAlpha(String),

    #[error("no positive-frequency transition {from}->{to} in the spectrum")]
    UnknownTransition { from: usize, to: usize },

    #[error("superoperator kind `{0}` requires a second operand")]
    MissingOperand(&'static str),

    #[error("map family is not the identity at t = 0 (defect {0:.3e})")]
    NonIdentityMap(f64),

    #[error("no stationary state found (smallest residual {0:.3e})")]
    NoStationaryState(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn dim(expected: usize, got: usize) -> Self {
        Error::DimensionMismatch { expected, got }
    }
}
