use thiserror::Error;

use crate::instance::{Value, Var};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable {0} does not exist")]
    UnknownVariable(Var),

    #[error("value {value} is not in the original domain of variable {var}")]
    UnknownValue { var: Var, value: Value },

    #[error("value {value} is not in the current domain of variable {var}")]
    ValueAbsent { var: Var, value: Value },

    #[error("expected two distinct variables, got {0} twice")]
    SameVariable(Var),

    #[error("invalid instance: {0}")]
    Invalid(String),

    #[error("search gave up after {0} nodes")]
    SearchCap(u64),

    #[error("step {step} ({rule}) on variable {var}, value {value}: {reason}")]
    Uncertified {
        step: usize,
        rule: String,
        var: Var,
        value: Value,
        reason: String,
    },

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
