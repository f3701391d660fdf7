use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("nest index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid nest: {0}")]
    InvalidNest(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("the zero projection has no predecessor")]
    NoPredecessor,

    #[error("nest map table is not monotone at index {index}")]
    NotMonotone { index: usize },

    #[error("invalid nest map table: {0}")]
    InvalidTable(String),

    #[error("subspace is not a T(N)-bimodule")]
    NotBimodule,

    #[error("subspace is not a Lie T(N)-module")]
    NotLieModule,

    #[error("subspace is not contained in the nest algebra")]
    NotInAlgebra,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;
