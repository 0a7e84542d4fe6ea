use thiserror::Error;

use crate::ext::ExtendedRealError;
use crate::quadrature::QuadratureError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension {0} is not supported here")]
    UnsupportedDimension(usize),
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Arithmetic(#[from] ExtendedRealError),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
