use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Negsp(#[from] negsp::Error),
}

impl CliError {
    /// Malformed input and bad flags exit with 1; failures of the
    /// randomized algorithms themselves exit with 2.
    pub fn exit_code(&self) -> u8 {
        use negsp::Error as E;
        match self {
            CliError::Io { .. } | CliError::Usage(_) => 1,
            CliError::Negsp(e) => match e {
                E::Parse { .. }
                | E::Contract(_)
                | E::WeightOutOfRange { .. }
                | E::WeightOverflow { .. }
                | E::NegativeWeightRejected { .. }
                | E::NegativeAttachmentRejected { .. } => 1,
                E::RecursionDepthExceeded { .. }
                | E::PreconditionViolated { .. }
                | E::RetryBudgetExhausted { .. }
                | E::Internal(_) => 2,
            },
        }
    }
}
