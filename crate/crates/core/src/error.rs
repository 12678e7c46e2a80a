use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An experiment or solver setup cannot be run as configured.
    #[error("configuration error: {0}")]
    Config(String),
    /// An argument violates an operation's precondition.
    #[error("argument error: {0}")]
    Argument(String),
    /// Array sizes do not agree.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    /// A linear system turned out to be singular.
    #[error("singular tridiagonal system (zero pivot at row {row})")]
    Singular { row: usize },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
