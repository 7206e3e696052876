use thiserror::Error;

/// Errors raised by geometry construction, checks and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate chart: tangent norm {min_speed:e} at node {node}")]
    DegenerateChart { node: usize, min_speed: f64 },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("node count mismatch: expected {expected}, got {got}")]
    NodeMismatch { expected: usize, got: usize },

    #[error("time {t} outside [{lo}, {hi}]")]
    TimeOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("{0} requires a closed-form ambient extension in 3D")]
    MissingExtension(&'static str),

    #[error("test-field support {detail}")]
    Support { detail: String },

    #[error("method of fundamental solutions failed after offsets {offsets:?}: trace error {trace_error:e}")]
    MfsFailed { offsets: Vec<f64>, trace_error: f64 },

    #[error("phase {phase} has {points} interior grid points (need at least {needed}); refine the grid")]
    Resolution { phase: &'static str, points: usize, needed: usize },

    #[error("one-sided extrapolation stencil at node {node} leaves its phase; refine the grid")]
    Stencil { node: usize },

    #[error("evaluation on the interface requested at distance {distance:e}")]
    OnInterface { distance: f64 },

    #[error("invalid config at {path}: {message}")]
    Config { path: String, message: String },

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
