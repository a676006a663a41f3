use std::process::ExitCode;

/// Failures surfaced by the command-line tool, each mapped to an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Exit code 2.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    /// Exit code 3.
    #[error("tolerance breach: {0}")]
    Tolerance(String),
    /// Exit code 1.
    #[error(transparent)]
    Library(#[from] qwalk::Error),
    /// Exit code 1.
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config { field: field.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            Self::Config { .. } => ExitCode::from(2),
            Self::Tolerance(_) => ExitCode::from(3),
            Self::Library(_) | Self::Io { .. } => ExitCode::from(1),
        }
    }
}
