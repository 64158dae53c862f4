use std::path::PathBuf;

use hpd_core::trajectory::Termination;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const CONVERGED: i32 = 0;
    pub const NOT_CONVERGED: i32 = 2;
    pub const INPUT: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}:{line}:{column}: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },

    /// The file parsed but the matrix failed a shape, Hermiticity or
    /// positivity check.
    #[error("{origin}: {source}")]
    Matrix {
        origin: String,
        #[source]
        source: hpd_core::Error,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] hpd_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use hpd_core::Error as E;
        match self {
            Self::Core(
                E::SpectralDomain { .. }
                | E::Overflow { .. }
                | E::NoConvergence { .. }
                | E::MetricSingular { .. },
            ) => exit::NUMERICAL,
            _ => exit::INPUT,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

pub fn termination_exit_code(t: Termination) -> i32 {
    match t {
        Termination::ToleranceMet => exit::CONVERGED,
        Termination::MaxIterations | Termination::Stalled => exit::NOT_CONVERGED,
        Termination::DomainExit | Termination::MetricSingular => exit::NUMERICAL,
    }
}

/// The most severe code among several runs.
pub fn combined_exit_code(codes: impl IntoIterator<Item = i32>) -> i32 {
    codes.into_iter().max().unwrap_or(exit::CONVERGED)
}
