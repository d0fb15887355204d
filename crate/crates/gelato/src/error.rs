//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GelatoError>;

#[derive(Error, Debug)]
pub enum GelatoError {
    #[error("column {column} is degenerate (zero empirical variance)")]
    DegenerateColumn { column: usize },

    #[error("diagonal entry {index} is not strictly positive ({value})")]
    DegenerateVariance { index: usize, value: f64 },

    #[error("matrix is not positive definite (pivot {pivot} failed)")]
    NotPositiveDefinite { pivot: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("asymmetric input: relative asymmetry {asymmetry:.3e} exceeds tolerance")]
    AsymmetricInput { asymmetry: f64 },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("lasso did not converge{}: max KKT violation {kkt_violation:.3e}",
            node.map(|i| format!(" at node {i}")).unwrap_or_default())]
    LassoDidNotConverge {
        kkt_violation: f64,
        node: Option<usize>,
    },

    #[error("constrained MLE does not exist for this input/edge set: {0}")]
    MleNonexistence(String),

    #[error("constrained MLE did not converge: KKT gap {kkt_gap:.3e} after {iterations} cycles")]
    MleConvergenceFailure { kkt_gap: f64, iterations: usize },

    #[error("degenerate random draw: {0}")]
    DegenerateDraw(String),

    #[error("tuning failed: {0}")]
    TuningFailure(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GelatoError {
    /// Process exit code for the CLI: 2 for configuration or parse
    /// problems, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            GelatoError::Parse { .. } | GelatoError::Config(_) | GelatoError::Io(_) => 2,
            _ => 3,
        }
    }
}
