use thiserror::Error;

/// Errors surfaced to the shell, each mapped to an exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Infeasible(_) => 4,
        }
    }
}

impl From<safety_first::Error> for CliError {
    fn from(e: safety_first::Error) -> Self {
        use safety_first::Error as E;
        match e {
            E::InvalidParameter { .. } | E::Unrealizable { .. } => CliError::Infeasible(e.to_string()),
            E::SampleTooShort { .. } | E::DegenerateSample => CliError::Input(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
