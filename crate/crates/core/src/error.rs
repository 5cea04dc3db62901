use thiserror::Error;

/// Errors raised by the simulation core.
///
/// The variants line up with the exit codes of the command-line front end:
/// configuration problems, coverage failures, missing dependencies and
/// degenerate models are kept apart so callers can react to each.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),
    #[error("point {index} lies outside the window")]
    OutsideWindow { index: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate score: {0}")]
    DegenerateScore(String),
    #[error("degenerate model: {0}")]
    DegenerateModel(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("method error: {0}")]
    Method(String),
    #[error("missing dependency: {0}")]
    Dependency(String),
    #[error("flat data: {0}")]
    FlatData(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
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

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
