//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by construction, checking and decomposition routines.
#[derive(Debug, Error)]
pub enum PertError {
    #[error("not hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("elements belong to different algebras")]
    AlgebraMismatch,

    #[error("term {term} is not an element of the algebra (residual {residual:.3e})")]
    InvalidAlgebraElement { term: usize, residual: f64 },

    #[error("matrix is not a member of the perturbation semigroup (residual {residual:.3e})")]
    NotAMember { residual: f64 },

    #[error("canonical structure violated (residual {residual:.3e})")]
    CanonicalStructureViolated { residual: f64 },

    #[error("cross part violates the self-adjointness linkage (residual {residual:.3e})")]
    CrossLinkageViolated { residual: f64 },

    #[error("unsupported algebra: {0}")]
    UnsupportedAlgebra(String),

    #[error("cost guard exceeded: representation dimension {dim} > {max}")]
    CostGuard { dim: usize, max: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

pub type Result<T> = std::result::Result<T, PertError>;
