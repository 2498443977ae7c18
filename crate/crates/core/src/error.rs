use thiserror::Error;

/// Errors raised by the measure computations and their inputs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("eigensolver did not meet its residual contract (residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid order {0}")]
    InvalidOrder(f64),

    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),

    #[error("rank {rank} outside 1..={max}")]
    InvalidRank { rank: usize, max: usize },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid probability mass function: {0}")]
    InvalidPmf(String),

    #[error("operator does not commute with the state (residual {residual:e})")]
    NotCommuting { residual: f64 },

    #[error("operator is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("operator is not CF-invariant (residual {residual:e})")]
    NotCfInvariant { residual: f64 },

    #[error("operator is not an orthogonal projector (residual {residual:e})")]
    NotProjector { residual: f64 },

    #[error("projector is not CF-invariant (residual {residual:e})")]
    NotCfInvariantProjector { residual: f64 },

    #[error("support condition for a finite value is violated")]
    FiniteBranchViolated,

    #[error("invalid tolerance {name} = {value}")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
