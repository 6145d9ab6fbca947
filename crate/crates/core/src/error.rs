use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid formula: {0}")]
    Formula(String),

    #[error("variable {var} out of range (formula has {num_vars} variables)")]
    VarOutOfRange { var: u32, num_vars: usize },

    #[error("invalid graph operation: {0}")]
    Graph(String),

    #[error("propagator contract violation: {0}")]
    PropagatorContract(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("brute force refused: {num_vars} variables exceeds the limit of {limit}")]
    TooManyVars { num_vars: usize, limit: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
