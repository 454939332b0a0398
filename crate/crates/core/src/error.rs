use thiserror::Error;

/// Errors raised by constructions, verifications and pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{qubits} qubits exceeds the simulator cap of {cap} qubits")]
    CapExceeded { qubits: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not unitary (max |U†U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("operator is not Hermitian (max |A - A†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("prescribed columns are not orthonormal (max Gram deviation = {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
