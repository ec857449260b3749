use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A search or enumeration would exceed its evaluation budget.
    #[error("budget exceeded: {what} needs {} evaluations, budget is {budget}", required.map(|r| r.to_string()).unwrap_or_else(|| "more".to_string()))]
    Budget {
        what: String,
        required: Option<u128>,
        budget: u128,
    },

    #[error("infeasible point: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn budget(what: impl Into<String>, required: Option<u128>, budget: u128) -> Self {
        Error::Budget {
            what: what.into(),
            required,
            budget,
        }
    }

    /// True for resource/budget errors (the CLI maps these to a distinct exit code).
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
