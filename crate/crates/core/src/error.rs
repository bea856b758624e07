use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Exact enumeration was requested for a configuration that is too large.
    #[error("exact enumeration refused: {0}; use sampled mode")]
    TooLarge(String),

    #[error("graph format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// Shorthand for returning `Err(Error::InvalidArgument(..))` when a condition fails.
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err($crate::error::Error::InvalidArgument(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
