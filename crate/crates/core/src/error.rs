use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("measure must contain at least one particle")]
    EmptyMeasure,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("particle count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("non-finite entry in {context}")]
    NonFinite { context: &'static str },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("interpolation parameter {0} outside [0, 1]")]
    InterpolationOutOfRange(f64),
    #[error("particle {index} has zero norm")]
    ZeroNormParticle { index: usize },
    #[error("objective does not declare the regularity constant {0}")]
    MissingRegularity(&'static str),
    #[error("divergence at iteration {k}: {what}")]
    Diverged { k: usize, what: &'static str },
    #[error("could not draw {n} distinct particles from the requested law")]
    DistinctnessFailed { n: usize },
    #[error("malformed data: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
