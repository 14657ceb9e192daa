use thiserror::Error;

/// Errors produced by factorization, clustering and data-generation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A matrix failed a structural invariant (emptiness, negative or
    /// non-finite entries).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// Operand shapes are incompatible.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A parameter is outside its documented range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A rank-one part of the model is identically zero, so its normalized
    /// direction (and hence the factorization volume) is undefined.
    #[error("degenerate component {index}: rank-one part is identically zero")]
    DegenerateComponent { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
