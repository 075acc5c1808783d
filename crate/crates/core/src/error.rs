use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("exact division by hbar failed: term without hbar present")]
    HbarDivision,

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("even grid size {0} rejected: the Weyl transform needs an odd number of points")]
    EvenGrid(usize),

    #[error("state is not normalized: norm = {0}")]
    Unnormalized(f64),

    #[error("boundary mass {mass:.3e} exceeds {limit:.1e}; enlarge the box")]
    BoundaryMass { mass: f64, limit: f64 },

    #[error("instability at t = {time}: norm drift {drift:.3e}")]
    Instability { time: f64, drift: f64 },

    #[error("io: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
