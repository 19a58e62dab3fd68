use thiserror::Error;

/// Errors raised by the algebraic kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("cannot parse scalar {input:?}: {reason}")]
    ParseScalar { input: String, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is outside the supported range 1..=16")]
    UnsupportedDimension(usize),

    #[error("blade index {index} is outside 1..={dim}")]
    BladeIndex { index: usize, dim: usize },

    #[error("blade indices must be strictly increasing")]
    UnsortedBlade,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix rows have inconsistent lengths")]
    RaggedMatrix,

    #[error("matrix is singular")]
    Singular,

    #[error("tuple has {found} endomorphisms, expected {expected}")]
    TupleLength { expected: usize, found: usize },

    #[error("empty endomorphism tuple")]
    EmptyTuple,

    #[error("multi-index has {found} entries, expected {expected}")]
    MultiIndexLength { expected: usize, found: usize },

    #[error("multi-index {0:?} is not square-free")]
    NotSquareFree(Vec<u32>),

    #[error("series truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: u32, right: u32 },

    #[error("constant coefficient of the series is not invertible")]
    NonInvertibleConstant,

    #[error("trace tensor does not belong to this tuple: {0}")]
    TensorMismatch(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
