use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Lib(#[from] siss::Error),
    #[error("check failed: {0}")]
    Check(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for bad input, 2 for numerical failure, 3 for a failed check.
    pub fn exit_code(&self) -> u8 {
        use siss::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Check(_) => 3,
            CliError::Lib(e) => match e {
                E::InvalidSpec(_)
                | E::InvalidSet(_)
                | E::Parse { .. }
                | E::NotPeriodic
                | E::NonIntegerPeriod(_)
                | E::HeightExceedsSmoothness { .. }
                | E::DerivativeOrder { .. }
                | E::Unsupported(_)
                | E::Io(_) => 1,
                _ => 2,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
