use thiserror::Error;

use crate::optimize::OptimizationResult;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no matching bracket for position {position} within {horizon} symbols")]
    NoMatch { position: i64, horizon: usize },

    #[error("transport condition violated{}: integral of E is {value}, must exceed 1", at.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    TransportCondition { value: f64, at: Option<f64> },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("budget exhausted: {0}")]
    Budget(String),

    /// The period/depth cap was hit; carries the best certified result found
    /// for a smaller period, when one exists.
    #[error("search cap exceeded: {message}")]
    SearchCap {
        message: String,
        best_so_far: Option<Box<OptimizationResult>>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
