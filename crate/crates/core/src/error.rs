use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("coincident points: kernel evaluated at x == y")]
    CoincidentPoints,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("evaluation point ({x}, {y}) is closer than {min_dist} to the curve")]
    PointTooClose { x: f64, y: f64, min_dist: f64 },
    #[error("GMRES breakdown at iteration {iteration}")]
    Breakdown { iteration: usize },
    #[error("eigenvalue iteration did not converge")]
    EigenNonConvergence,
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("invalid config field `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
