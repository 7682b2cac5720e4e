use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// The moment generating function is infinite at `theta`.
    #[error(
        "moment generating function diverges at theta = {theta}; domain boundary is {boundary}"
    )]
    Divergent { theta: f64, boundary: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("means differ: {x} vs {z}")]
    MeanMismatch { x: f64, z: f64 },

    /// Malformed input file; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
