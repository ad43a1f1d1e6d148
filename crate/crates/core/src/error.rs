use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("syntax error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("arity mismatch: expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("enumeration budget exceeded: {need} evaluations needed, budget {budget}")]
    Budget { need: u128, budget: u128 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal consistency: {0}")]
    Inconsistency(String),
}
