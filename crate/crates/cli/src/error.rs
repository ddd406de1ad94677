use thiserror::Error;

/// Every failure the binary reports. `Config` and `Parse` abort before any
/// computation (exit 1); `Numerical` means a solver refused to produce a value
/// (exit 2); `Io` covers reading inputs and writing the table (exit 1).
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Parse(_) => "parse",
            CliError::Io(_) => "io",
            CliError::Numerical(_) => "numerical",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            _ => 1,
        }
    }

    /// One line: `error kind=<kind> msg="<message>"`, with the message escaped
    /// so the line never breaks.
    pub fn line(&self) -> String {
        format!("error kind={} msg={:?}", self.kind(), self.to_string())
    }
}

pub fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
