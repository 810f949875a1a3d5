use thiserror::Error;
use tsvm_core::TsvmError;

/// Failures of a command, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message}")]
    Regime {
        message: String,
        witness: Option<Vec<f64>>,
    },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: u64,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0}")]
    Suite(String),

    #[error("plot: {0}")]
    Plot(String),

    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Regime { .. } => 2,
            CliError::Parse { .. } => 3,
            CliError::Dimension(_) => 4,
            CliError::Suite(_) => 5,
            CliError::Plot(_) => 6,
            CliError::Other(_) => 1,
        }
    }

    pub(crate) fn parse(path: &str, line: u64, column: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            path: path.to_string(),
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<TsvmError> for CliError {
    fn from(e: TsvmError) -> Self {
        match e {
            TsvmError::NotTrainable { reason, witness } => CliError::Regime {
                message: format!("class hulls share a common point: {reason}"),
                witness,
            },
            TsvmError::UnsupportedDimension { .. } => CliError::Dimension(e.to_string()),
            other => CliError::Other(other.into()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}
