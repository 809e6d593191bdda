use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sphere dimension must be 1, 2, or 3 (got {0})")]
    InvalidDimension(usize),

    #[error("grid resolution must be even and at least 4 (got {0})")]
    InvalidResolution(usize),

    #[error("grid function does not live on the expected grid")]
    GridMismatch,

    #[error("values length {got} does not match node count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("alpha = {alpha} must exceed the sphere dimension n = {n}")]
    AlphaNotSupercritical { n: usize, alpha: f64 },

    #[error("alpha must be positive and different from n = {n} (got {alpha})")]
    AlphaInvalid { n: usize, alpha: f64 },

    #[error("function must be strictly positive (node {index} holds {value})")]
    NonpositiveValue { index: usize, value: f64 },

    #[error("weight function R must be antipodally symmetric (defect {defect:.3e})")]
    AsymmetricWeight { defect: f64 },

    #[error("Euler-Lagrange residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("this check requires the uniform circle grid (n = 1)")]
    NonUniformGrid,

    #[error("linear system is numerically singular; provide a positive regularization")]
    SingularSystem,

    #[error("invalid manifold data: {0}")]
    InvalidManifold(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("delta0 = {0} must lie in (0, sqrt(2))")]
    InvalidCapRadius(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
