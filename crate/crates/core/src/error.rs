use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid body spec: field `{field}`: {reason}")]
    InvalidSpec { field: String, reason: String },

    #[error("matrix is not orthogonal (residual {0:e})")]
    NotOrthogonal(f64),

    #[error("unbounded body: {0}")]
    Unbounded(String),

    #[error("containment violated in direction {witness:?}: {detail}")]
    Containment { witness: Vec<f64>, detail: String },

    #[error("hypothesis failed: {detail}")]
    Hypothesis {
        detail: String,
        witness: Option<Vec<f64>>,
    },

    #[error("spherical projection undefined: point is orthogonal to the target subspace")]
    UndefinedProjection,

    #[error("net certification failed: covering radius {achieved} exceeds {requested} after {rounds} rounds")]
    NetCertification {
        requested: f64,
        achieved: f64,
        rounds: usize,
    },

    #[error("schedule infeasible at these constants: {0}")]
    InfeasibleSchedule(String),

    #[error("iteration cap exceeded: {0}")]
    IterationCap(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn spec(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidSpec {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
