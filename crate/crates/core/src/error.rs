//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("polyhedral vertex set is not symmetric (missing -v for some vertex v)")]
    AsymmetricVertices,
    #[error("zero vector where a direction is required")]
    ZeroVector,
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("unsupported strategy: {0}")]
    UnsupportedStrategy(String),
    #[error("degenerate pivot block in Sylvester reduction (|D_(r-1)| = {0:.3e})")]
    PivotDegenerate(f64),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("subspace is not contained in the kernel intersection (residual {0:.3e})")]
    KernelMismatch(f64),
    #[error("input is not on the unit sphere (norm {0})")]
    NonUnitInput(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("optimizer budget exhausted: {0}")]
    BudgetExhausted(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(slice: &[f64]) -> Result<()> {
    if slice.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn ensure_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
