use thiserror::Error;

/// Errors raised by the periodic potential toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid cell: {0}")]
    InvalidCell(String),
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("evaluation point lies on the lattice (distance {distance:e})")]
    SingularPoint { distance: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("inadmissible diffeomorphism: {0}")]
    InvalidDiffeo(String),
    #[error("boundary leaves the periodicity cell: {0}")]
    OutOfCell(String),
    #[error("wave number is resonant: {count} lattice modes satisfy k^2 = |2 pi q^-1 z + eta|^2")]
    Resonant { count: usize },
    #[error("requested accuracy not reachable, achieved bound {achieved:e}")]
    Accuracy { achieved: f64 },
    #[error("linear solve failed: {reason} (condition estimate {condition:e})")]
    SolveFailed { reason: String, condition: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
