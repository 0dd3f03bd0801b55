//! Crate-wide error type with stable codes for the file-format surface.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("E_RAT: {0}")]
    Rational(String),
    #[error("E_DIM: dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("E_CONE: {0}")]
    Cone(String),
    #[error("E_SCALE: invalid scale factor {0} (must be nonnegative or -1)")]
    InvalidScale(String),
    #[error("E_DUAL: direction {0} is not in the negative dual cone")]
    NotInDualCone(String),
    #[error("E_SCHEMA: {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("E_PREMISE: {0}")]
    PremiseViolated(String),
    #[error("E_THEOREM: internal consistency failure: {0}")]
    TheoremViolation(String),
    #[error("E_IO: {0}")]
    Io(String),
}

impl Error {
    pub fn rational(msg: impl Into<String>) -> Self {
        Error::Rational(msg.into())
    }

    pub fn dim(msg: impl Into<String>) -> Self {
        Error::DimMismatch(msg.into())
    }

    pub fn cone(msg: impl Into<String>) -> Self {
        Error::Cone(msg.into())
    }

    pub fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            msg: msg.into(),
        }
    }

    /// Stable machine-readable code, used by the CLI report files.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Rational(_) => "E_RAT",
            Error::DimMismatch(_) => "E_DIM",
            Error::Cone(_) => "E_CONE",
            Error::InvalidScale(_) => "E_SCALE",
            Error::NotInDualCone(_) => "E_DUAL",
            Error::Schema { .. } => "E_SCHEMA",
            Error::PremiseViolated(_) => "E_PREMISE",
            Error::TheoremViolation(_) => "E_THEOREM",
            Error::Io(_) => "E_IO",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
