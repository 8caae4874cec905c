use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("covariance not positive definite")]
    NotPositiveDefinite,

    #[error("matrix square root failed: {0}")]
    SquareRoot(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("at least one iteration required")]
    NoIterations,

    #[error("all candidate costs are non-finite")]
    AllCostsNonFinite,

    #[error("block index {index} out of range for {blocks} blocks")]
    BlockOutOfRange { index: usize, blocks: usize },

    #[error("integral did not converge: {0}")]
    Quadrature(String),
}
