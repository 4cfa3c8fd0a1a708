use thiserror::Error;

/// Errors raised by the counting, congruence and density routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("{a} is not invertible modulo {q}")]
    NotInvertible { a: i128, q: u64 },
    #[error("invalid congruence instance: {0}")]
    InvalidInstance(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("height {height} exceeds the exhaustive-enumeration cap {cap}")]
    CapExceeded { height: u64, cap: u64 },
    #[error("integer overflow while evaluating {0}")]
    Overflow(&'static str),
    #[error("quadrature did not converge: achieved error {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },
    #[error("independent evaluations disagree: {0}")]
    Disagreement(String),
    #[error("polytope: {0}")]
    Polytope(String),
    #[error("torsor map: {0}")]
    TorsorMap(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
