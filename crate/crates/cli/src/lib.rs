//! Experiment driver: configuration, seeding, persistence and the canned
//! reproductions behind the `sparsezeros` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{run, Command};
pub use config::{ExperimentConfig, Overrides, PolytopeRef};

/// Exit status for malformed or unresolvable configuration.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for numerical failures (solver, factorizations).
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::Io(_) => 1,
        }
    }
}

impl From<sparsezeros::Error> for CliError {
    fn from(e: sparsezeros::Error) -> Self {
        use sparsezeros::Error as E;
        match e {
            E::NotPositiveDefinite { .. }
            | E::GramResidual(..)
            | E::ZeroPolynomial
            | E::DegenerateLeading(_)
            | E::DegenerateResultant
            | E::Eigensolver(_)
            | E::MomentFit(_) => CliError::Numeric(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
