use thiserror::Error;

/// Errors raised by model construction and closed-form evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The argument lies outside the domain on which the requested
    /// transform or exponent is finite (or defined at all).
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),

    #[error("wrong model variant: expected {expected} model")]
    WrongVariant { expected: &'static str },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The parameters are valid but fall into a case that has no closed form.
    #[error("invalid case: {0}")]
    InvalidCase(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::UnsupportedDomain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
