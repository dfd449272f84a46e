use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("period matrix is not symmetric: |omega[{i}][{j}] - omega[{j}][{i}]| = {deviation:e}")]
    NotSymmetric { i: usize, j: usize, deviation: f64 },

    #[error("imaginary part of the period matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("ill-conditioned period matrix: {0}")]
    IllConditioned(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("instance too large: {size} elements exceeds the configured cap {cap}")]
    InstanceTooLarge { size: u128, cap: u64 },

    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: u64, b: u64 },

    #[error("homogeneous class not invertible under the Fourier-Mukai formula (slope 0)")]
    ZeroSlope,

    #[error("Pontryagin product degenerates: slopes sum to zero")]
    DegeneratePontryagin,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("identity check failed: {0}")]
    IdentityFailed(String),

    #[error("regime not implemented: {0}")]
    Unsupported(String),

    #[error("ambiguous singular-value gap: sigma = {sigma:e} lies within a factor {factor} of the threshold {threshold:e}")]
    AmbiguousGap {
        sigma: f64,
        threshold: f64,
        factor: f64,
    },

    #[error("twist calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by numerical ambiguity rather than bad input.
    pub fn is_numerical_ambiguity(&self) -> bool {
        matches!(self, Error::AmbiguousGap { .. } | Error::CalibrationFailed(_))
    }
}
