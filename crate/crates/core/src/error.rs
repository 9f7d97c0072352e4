use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameters outside the disordered phase window: {0}")]
    Phase(String),
    #[error("requested work exceeds the configured bound: {0}")]
    Precision(String),
    #[error("lost all significant digits in a factorization pivot: {0}")]
    Conditioning(String),
    #[error("adaptive precision did not converge: {0}")]
    NonConvergence(String),
    #[error("enumeration size {n} exceeds the cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("not an alternating sign matrix: {0}")]
    InvalidAsm(String),
    #[error("quadrature failed to reach tolerance: {0}")]
    Quadrature(String),
    #[error("evaluation on a branch cut: {0}")]
    Branch(String),
    #[error("root finding failed: {0}")]
    RootFind(String),
    #[error("degenerate least-squares fit: {0}")]
    DegenerateFit(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
