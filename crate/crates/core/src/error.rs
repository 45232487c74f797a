use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("{what} needs {needed} steps, over the cap of {cap}")]
    Cap { what: &'static str, needed: String, cap: u64 },
    #[error("illegal move by agent {agent} in round {round}: {reason}")]
    IllegalMove { agent: usize, round: usize, reason: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
}

pub type Result<T> = std::result::Result<T, Error>;
