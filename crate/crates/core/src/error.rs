//! Error type shared by the whole crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix does not satisfy the algebra identity X^t J + J X = 0 (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },

    #[error("matrix does not preserve the ambient form (residual {residual:.3e})")]
    NotInGroup { residual: f64 },

    #[error("group element does not fix the basepoint ray (residual {residual:.3e})")]
    NotInP { residual: f64 },

    #[error("algebra element has a nonzero lowest-grade part (residual {residual:.3e})")]
    NotInLittleP { residual: f64 },

    #[error("algebra element is not in the lowest graded piece (residual {residual:.3e})")]
    NotNminus { residual: f64 },

    #[error("null vector rejected: the form vanishes on this input")]
    NullVector,

    #[error("zero vector cannot represent a projective point")]
    ZeroVector,

    #[error("representative is not on the null cone (residual {residual:.3e})")]
    NotNullRay { residual: f64 },

    #[error("curve leaves the chart at infinity")]
    OutsideChart,

    #[error("eigenvalue clusters too close to separate: {0}")]
    IllConditioned(String),

    #[error("no parabolic vector pairs with the translation part: {0}")]
    NoParabolicVector(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
