//! Failure classification for the process exit code contract:
//! 0 success, 2 configuration error, 3 numerical failure, 4 experiment-level
//! assertion failure (including failure to materialize an artifact).

use std::fmt;

/// A command failure, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config keys/values, degenerate geometry requests, or an
    /// unusable plot input. Exit code 2.
    Config(String),
    /// The numerical pipeline (SCF, diagonalization, state algebra) failed.
    /// Exit code 3.
    Numerical(String),
    /// A post-condition on experiment results was violated, or an artifact
    /// could not be written. Exit code 4.
    Experiment(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Experiment(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(msg) => write!(f, "configuration error: {msg}"),
            Failure::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Failure::Experiment(msg) => write!(f, "experiment failure: {msg}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<h4sim::Error> for Failure {
    fn from(e: h4sim::Error) -> Self {
        match e {
            h4sim::Error::DegenerateGeometry => Failure::Config(format!(
                "{e}; sample 89.8 and 90.2 degrees instead (the default grid replaces 90 by that pair)"
            )),
            h4sim::Error::InvalidInput(_) => Failure::Config(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Experiment(format!("artifact i/o: {e}"))
    }
}

/// Result alias carrying a classified failure.
pub type CliResult<T> = Result<T, Failure>;
