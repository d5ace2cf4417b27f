use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("mixed arithmetic modes in one evaluation")]
    Mode,
    #[error("matrix must have dimension at least 1")]
    EmptyMatrix,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("series is not normalized: value at index 0 must equal 1")]
    Normalization,
    #[error("derivative budget exhausted at segment {segment}: {reason}")]
    Budget { segment: usize, reason: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix dimension {n} exceeds the oracle limit {limit}")]
    OracleLimit { n: usize, limit: usize },
    #[error("malformed circuit: {0}")]
    Circuit(String),
    #[error("input magnitude {got} exceeds the bound M = {bound}")]
    Magnitude { got: f64, bound: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
