use thiserror::Error;

/// Errors raised by the numerical routines and the text formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("singular value decomposition did not converge")]
    SvdFailed,

    #[error("invalid spectral vector: {0}")]
    InvalidSpectrum(String),

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite iterate at iteration {iteration} ({stage})")]
    NonFiniteIterate { iteration: usize, stage: &'static str },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
