use drlr::Error as LibError;

/// CLI-level failure, carrying the process exit code.
///
/// Exit codes: 0 success, 1 usage or configuration problems, 2 a fit that
/// did not converge, 3 anything that smells of I/O (missing files, broken
/// CSV or JSON content, write failures).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::NonConvergence(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> CliError {
        CliError::Io(msg.into())
    }
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> CliError {
        match e {
            LibError::Io(_)
            | LibError::Csv(_)
            | LibError::CsvParse { .. }
            | LibError::MissingValue { .. }
            | LibError::LabelCardinality { .. } => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
