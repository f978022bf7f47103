use std::fmt;

/// Failures that end a run, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or invalid input files. Exit code 2.
    Input(String),
    /// A construction or check could not deliver its guarantee. Exit code 1.
    Failure(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Failure(m) => write!(f, "failure: {m}"),
        }
    }
}

impl From<netcap::Error> for CliError {
    fn from(e: netcap::Error) -> Self {
        match e {
            netcap::Error::Construction(_) => CliError::Failure(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
