use std::path::PathBuf;

use juggle_core::sim::SimError;
use juggle_core::Error;

/// Failures surfaced by the command line, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// The requested motion or configuration cannot be realized.
    #[error("infeasible: {0}")]
    Infeasible(Error),
    /// Gain synthesis or a closed-loop run failed.
    #[error("simulation failed at {0}")]
    Simulation(SimError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) => 2,
            CliError::Simulation(_) => 3,
            CliError::Io { .. } | CliError::Format { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Format {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParams(_)
            | Error::InvalidSpec(_)
            | Error::InvalidConfig(_)
            | Error::OffsetOutOfRange { .. }
            | Error::DegenerateSection { .. }
            | Error::InfeasibleFlightTime { .. }
            | Error::FixedPointDrift { .. } => CliError::Infeasible(e),
            other => CliError::Simulation(SimError {
                step: None,
                source: other,
            }),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e.step {
            None => e.source.into(),
            Some(_) => CliError::Simulation(e),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
