use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid modulus {0}: must satisfy 2 <= m <= 65536")]
    InvalidModulus(u64),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },

    #[error("modulus {0} is not prime")]
    NotPrime(u32),

    #[error("parse error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("resource cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
