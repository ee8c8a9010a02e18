use thiserror::Error;

/// Errors raised by the operator toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("expected {expected} entries for a {rows}x{cols} matrix, got {got}")]
    EntryCount {
        rows: usize,
        cols: usize,
        expected: usize,
        got: usize,
    },

    #[error("invalid numerical context: {0}")]
    InvalidContext(String),

    #[error("singular value decomposition of a {rows}x{cols} matrix did not converge")]
    ConvergenceFailure { rows: usize, cols: usize },

    #[error("operator must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("subspaces live in different ambient spaces ({left} vs {right})")]
    AmbientMismatch { left: usize, right: usize },

    #[error("numerical rank {rank} is ill-determined (gap ratio {gap_ratio:.3e})")]
    IllDeterminedRank { rank: usize, gap_ratio: f64 },

    #[error("operator is not EP")]
    NotEp,

    #[error("restriction of the operator to its range is singular (sigma_min = {sigma_min:.3e})")]
    SingularRestriction { sigma_min: f64 },

    #[error("block operator A is singular (sigma_min = {sigma_min:.3e})")]
    SingularBlock { sigma_min: f64 },

    #[error("positive-definite solve failed at omega = {omega:e}")]
    LinearSolveFailure { omega: f64 },

    #[error("invalid regularization schedule: {0}")]
    InvalidSchedule(String),

    #[error("rank {rank} out of bounds for dimension {dim}")]
    RankOutOfBounds { rank: usize, dim: usize },

    #[error("operators do not commute (residual {residual:.3e})")]
    NotCommuting { residual: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("cutoff {cutoff} is invalid: {reason}")]
    InvalidCutoff { cutoff: usize, reason: &'static str },

    #[error("block shapes do not match the algebra: {0}")]
    BlockShape(String),
}

pub type Result<T> = std::result::Result<T, Error>;
