use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operand dimensions disagree (switch vector length, cube side, ...).
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A well-formed input outside the supported family, e.g. odd column count.
    #[error("unsupported shape: {0}")]
    Unsupported(String),

    /// An argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("resource cap exceeded: {what} needs {required}, cap is {cap}")]
    Resource {
        what: String,
        required: u64,
        cap: u64,
    },

    /// A postcondition the construction promises did not hold. Always a bug.
    #[error("internal guarantee violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
