use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch { expected: Vec<usize>, got: Vec<usize> },

    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    #[error("backward pass does not match the recorded forward pass: {0}")]
    BackwardMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite loss at step {step}")]
    NonFiniteLoss { step: u64 },

    #[error("Jacobi eigen solver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("negative probability {0}")]
    NegativeProbability(f64),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("point ({x}, {y}) lies outside the open unit disk")]
    OutsideDisk { x: f64, y: f64 },

    #[error("idx: bad magic number {found:#010x}, expected {expected:#010x}")]
    IdxBadMagic { expected: u32, found: u32 },

    #[error("idx: truncated payload, need {needed} bytes but have {available}")]
    IdxTruncated { needed: usize, available: usize },

    #[error("idx: image count {images} does not match label count {labels}")]
    IdxCountMismatch { images: usize, labels: usize },

    #[error("missing data file {path}: {hint}")]
    MissingData { path: String, hint: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable identifier for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::ShapeMismatch { .. } => "shape-mismatch",
            Error::InvalidArchitecture(_) => "invalid-architecture",
            Error::BackwardMismatch(_) => "backward-mismatch",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::NonFiniteLoss { .. } => "non-finite-loss",
            Error::NoConvergence { .. } => "no-convergence",
            Error::NegativeProbability(_) => "negative-probability",
            Error::EmptyInput(_) => "empty-input",
            Error::OutsideDisk { .. } => "outside-disk",
            Error::IdxBadMagic { .. } => "idx-bad-magic",
            Error::IdxTruncated { .. } => "idx-truncated",
            Error::IdxCountMismatch { .. } => "idx-count-mismatch",
            Error::MissingData { .. } => "missing-data",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
