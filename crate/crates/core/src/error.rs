use thiserror::Error;

use crate::geom::Vector;

/// Errors raised anywhere in the pipeline.
///
/// Variants fall into two families: input/construction problems (bad
/// arguments, unsupported dimensions, degenerate geometry) and certificate
/// failures (a constructed object does not pass its own verification).
/// [`Error::is_certificate_failure`] tells them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("association violated: {0}")]
    Association(String),

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("linear program: {0}")]
    Lp(String),

    #[error("lift violation: torus point {witness:?} is not covered by any translate")]
    LiftViolation { witness: Vector },

    #[error("certificate violated: {0}")]
    Certificate(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures of a verification step rather than of the input.
    pub fn is_certificate_failure(&self) -> bool {
        matches!(self, Error::LiftViolation { .. } | Error::Certificate(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
