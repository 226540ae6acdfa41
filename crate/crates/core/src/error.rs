use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid sizing: {0}")]
    Sizing(String),
    #[error("fields are sampled on different grids")]
    GridMismatch,
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("spectral parameter must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("factorization failed at pivot {0}")]
    Singular(usize),
    #[error("no convergence in {level}: {detail}")]
    NoConvergence { level: &'static str, detail: String },
    #[error("iterate left the admissible ball: {0}")]
    BallExit(String),
    #[error("newton iteration diverged: {0}")]
    Divergence(String),
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("stability: {0}")]
    Stability(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
