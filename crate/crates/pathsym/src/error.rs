use crate::config::ConfigError;
use crate::spec::SpecError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Spec(#[from] SpecError),

    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid state file: {message}")]
    StateFile { path: String, message: String },

    #[error(transparent)]
    Compute(#[from] pathsym_core::Error),
}

impl CliError {
    /// 2 for malformed input, 1 for everything that failed while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Spec(_) | Self::Config(_) | Self::Usage(_) => 2,
            _ => 1,
        }
    }
}
