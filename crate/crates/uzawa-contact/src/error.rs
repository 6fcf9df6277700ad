use thiserror::Error;

/// Errors shared across the linear algebra kernel, mesh generator,
/// solvers and instance I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot_index} is too small)")]
    NotPositiveDefinite { pivot_index: usize },

    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("iteration did not converge within {max_iter} steps")]
    NoConvergence { max_iter: usize },

    #[error("matrix is identically zero")]
    ZeroMatrix,

    #[error("degenerate element: non-positive Jacobian at a quadrature point")]
    DegenerateElement,

    #[error("nx = {nx} is not divisible by 3")]
    InvalidMeshRatio { nx: usize },

    #[error("active-set enumeration limited to m <= 12, got m = {m}")]
    TooManyConstraints { m: usize },

    #[error("no active set satisfied the KKT conditions")]
    NoFeasibleSubset,

    #[error("instance parse error: {0}")]
    Parse(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
