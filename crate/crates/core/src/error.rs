use thiserror::Error;

/// Errors raised across the crate.
///
/// Variants name the contract that was violated so the CLI can map them to
/// distinct exit codes and messages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected order {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tensor factors {dims:?} have product {product}, matrix order is {order}")]
    BadFactorization {
        dims: Vec<usize>,
        product: usize,
        order: usize,
    },

    #[error("matrix is not hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("party index {index} out of range for {parties} tensor factors")]
    PartyOutOfRange { index: usize, parties: usize },

    #[error("eigensolver did not converge within {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("zero matrix has no logarithm")]
    ZeroLogarithm,

    #[error("not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("σ is not on the PT-boundary (partial transpose has empty kernel)")]
    EmptyKernel,

    #[error("invalid coefficients: {0}")]
    BadCoefficients(String),

    #[error("degenerate witness: ψ equals the support projector")]
    DegenerateWitness,

    #[error("witness does not support σ: {0}")]
    WitnessMismatch(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("boundary state generation failed after {attempts} attempts: {reason}")]
    GenerationFailed { attempts: usize, reason: String },

    #[error("projection did not reach feasibility (worst violation {violation:e})")]
    ProjectionInfeasible { violation: f64 },

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
