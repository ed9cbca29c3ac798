use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("operands live on different measure spaces")]
    SpaceMismatch,

    #[error("weight {index} is {weight}, weights must be strictly positive")]
    NonPositiveWeight { index: usize, weight: f64 },

    #[error("block dimension {index} is zero")]
    ZeroBlockDim { index: usize },

    #[error("range inclusion fails (projection residual {residual:.3e})")]
    RangeNotIncluded { residual: f64 },

    #[error("family is not a c-K-g-frame (range residual {residual:.3e})")]
    NotKgFrame { residual: f64 },

    #[error("bound is unconstrained (K = 0)")]
    Unconstrained,

    #[error("family is not an atomic system for {0}")]
    NotAtomic(String),

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("family is not a dual (duality residual {residual:.3e})")]
    NotADual { residual: f64 },

    #[error("operator is zero")]
    ZeroOperator,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
