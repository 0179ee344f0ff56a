use thiserror::Error;

/// Errors produced anywhere in the canonicalization and certification pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("matrix is not positive definite (min eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero vector supplied where a nonzero vector is required")]
    ZeroVector,

    #[error("local factor is singular")]
    SingularFactor,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("state is not in canonical form: {0}")]
    NotCanonical(String),

    #[error("family invariant violated: {0}")]
    InvariantViolated(String),

    #[error("matrix {0} of the family is not normal")]
    NotNormal(usize),

    #[error("matrices {0} and {1} of the family do not commute")]
    NotCommuting(usize, usize),

    #[error("could not resolve a degenerate joint eigenspace")]
    DegeneracyUnresolved,

    #[error("inconclusive: no product vector with a full-rank projection was found")]
    NoProductVector,

    #[error("certificate reconstruction failed (relative residual {0:.3e})")]
    ReconstructionFailed(f64),

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
