use thiserror::Error;

/// Failures surfaced to the shell, each with its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] dyadic_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("acceptance criteria failed: {0}")]
    ReportFailed(usize),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use dyadic_core::Error as E;
        match self {
            CliError::Infeasible(_) => 2,
            CliError::ReportFailed(_) => 4,
            CliError::Core(
                E::Domain(_)
                | E::NeighborOutOfDomain { .. }
                | E::EmptyInterior { .. }
                | E::BoundaryCell { .. }
                | E::UnboundedDerivatives
                | E::InsufficientSamples { .. }
                | E::AllBelowFloor
                | E::LevelUnknown(_)
                | E::ZeroDenominator,
            ) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
