use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid --{field}: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Run(#[from] grouplab::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot encode report: {0}")]
    Encode(String),
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// 1 for configuration problems, 2 for everything that went wrong
    /// while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Run(grouplab::Error::Config(_) | grouplab::Error::Parse { .. }) => 1,
            _ => 2,
        }
    }
}
