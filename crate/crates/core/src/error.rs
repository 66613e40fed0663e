use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("lag {0} is odd; a simple walk can only return to a level after an even number of steps")]
    OddLag(u64),
    #[error("walk of length {len} exceeds the oracle cap of {cap}")]
    OracleCapExceeded { len: usize, cap: usize },
    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),
    #[error("integral diverges: {0}")]
    Divergent(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err($crate::error::invalid(format!($($fmt)+)));
        }
    };
}
pub(crate) use ensure;
