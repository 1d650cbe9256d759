use thiserror::Error;

/// Errors raised by mechanism construction, evaluation and analysis.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("operation requires a bounded valuation domain")]
    UnboundedDomain,

    #[error("scoring rule is unbounded: {0}")]
    UnboundedScore(String),

    #[error("scoring rule is trivial (C = 0)")]
    TrivialRule,

    #[error("infeasible setting: {0}")]
    Feasibility(String),

    #[error("enumeration of {required} utility evaluations exceeds the budget of {cap}")]
    Budget { required: u128, cap: u64 },

    #[error("invalid value at `{path}`: {message}")]
    Validation { path: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
