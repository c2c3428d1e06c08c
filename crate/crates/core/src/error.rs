use thiserror::Error;

/// Errors produced by the samplers, solvers and experiments.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A request exceeds an enumeration or memory guard.
    #[error("refused: {0}")]
    Refused(String),

    /// The growing path has no free neighbor left.
    #[error("path tip at {0} is enclosed by the path")]
    Enclosed(crate::lattice::LatticePoint),

    /// An iterative solver failed to reach its residual target.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Something that cannot happen with a correct generator or solver.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn validation(msg: impl Into<String>) -> Error {
    Error::Validation(msg.into())
}
