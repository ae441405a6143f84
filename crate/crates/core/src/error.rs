use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested enumeration or search would visit `needed` items, above `budget`.
    #[error("budget exceeded: {what} needs {needed} but the budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u128,
    },

    #[error("refinement produced no energy gain (order {order})")]
    NoEnergyGain { order: usize },

    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
