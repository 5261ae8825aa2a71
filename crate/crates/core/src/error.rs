use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("context error: {0}")]
    Context(String),
    #[error("infeasible constraint: {0}")]
    Constraint(String),
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("operators do not form a chain complex: {0}")]
    NotAChain(String),
    #[error("premise does not hold: {0}")]
    Premise(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("operator has trivial kernel: {0}")]
    Kernel(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Context(_) => "context_error",
            Error::Constraint(_) => "constraint_error",
            Error::Hypothesis(_) => "hypothesis_unmet",
            Error::NotAChain(_) => "not_a_chain",
            Error::Premise(_) => "premise_failed",
            Error::Domain(_) => "domain_error",
            Error::Kernel(_) => "trivial_kernel",
            Error::Sampling(_) => "sampling_error",
            Error::Parse(_) | Error::Json(_) => "malformed_input",
            Error::Io(_) => "io_error",
        }
    }

    /// True for errors that report an unmet theorem condition rather than bad input.
    pub fn is_condition_unmet(&self) -> bool {
        matches!(
            self,
            Error::Hypothesis(_)
                | Error::NotAChain(_)
                | Error::Premise(_)
                | Error::Domain(_)
                | Error::Kernel(_)
                | Error::Constraint(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
