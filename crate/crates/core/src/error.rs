use thiserror::Error;

/// Errors produced anywhere in the bound computations or the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap:e}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },

    #[error("third-derivative tensor is not symmetric (relative asymmetry {0:e})")]
    AsymmetricTensor(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("threshold unreachable: {0}")]
    Unreachable(String),

    #[error("Delta = {delta:e} is not positive for eta = {eta}; largest feasible eta is {max_eta:.6}")]
    DeltaNonpositive { eta: f64, delta: f64, max_eta: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e} after {cells} cells")]
    NoConvergence { estimate: f64, error: f64, cells: usize },

    #[error("dimension {0} is too large for tensor-product quadrature (at most 3)")]
    DimensionTooLarge(usize),

    #[error("problem `{0}` has no oracle route for this request")]
    NoOracle(String),

    #[error("cannot parse problem selector `{selector}`: {reason}")]
    Selector { selector: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
