use thiserror::Error;

/// Errors shared across the numerical modules.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    #[error("gamma pole at non-positive integer s = {0}")]
    GammaPole(f64),
    #[error("hurwitz zeta pole at s = 1")]
    ZetaPole,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("eigenvalue iteration failed to converge after {iterations} iterations")]
    EigenConvergence { iterations: usize },
    #[error("spectrum not converged to tol {tol:.3e} after {doublings} truncation doublings (last change {last_change:.3e})")]
    TruncationNotConverged {
        doublings: usize,
        tol: f64,
        last_change: f64,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("nonpositive base in zeta sum: lambda + tau = {0:.6e}")]
    NonpositiveBase(f64),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
