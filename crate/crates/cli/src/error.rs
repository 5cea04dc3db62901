use thiserror::Error;

/// Failures of a CLI run, each with its process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] asclt::Error),
    #[error("inconsistent artifacts: {0}")]
    Mismatch(String),
}

impl CliError {
    /// 0 success, 2 configuration, 3 coverage, 4 missing or mismatched inputs,
    /// 5 degenerate model, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use asclt::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Mismatch(_) => 4,
            CliError::Core(e) => match e {
                E::Domain(_) | E::Precondition(_) | E::Method(_) | E::Unsupported(_) | E::Parse(_) | E::Precision(_) => 2,
                E::Coverage(_) => 3,
                E::Dependency(_) => 4,
                E::DegenerateModel(_) => 5,
                _ => 1,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
