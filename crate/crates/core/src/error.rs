use thiserror::Error;

/// Errors raised by the simulation modules.
///
/// The CLI maps [`Error::Config`] to exit status 2 and every other variant
/// (physical-invariant violations) to exit status 3.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid pointer overlap: |overlap| = {0} exceeds 1")]
    InvalidOverlap(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("state is not normalized: |c1|^2 + |c2|^2 = {0}")]
    Unnormalized(f64),

    #[error("unsupported packet pair: {0}")]
    UnsupportedPair(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("undefined quantity: {0}")]
    Undefined(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
