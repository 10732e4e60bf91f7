use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid formula: {0}")]
    InvalidFormula(String),

    /// An empty clause appeared during simplification or message passing.
    #[error("contradiction: {0}")]
    Contradiction(String),

    /// A precondition on a generalized assignment does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("formula is unsatisfiable")]
    Unsatisfiable,

    #[error("{what} exceeds the configured cap ({got} > {cap})")]
    OverCap { what: &'static str, got: usize, cap: usize },

    #[error("enumeration incomplete: {0}")]
    Incomplete(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
