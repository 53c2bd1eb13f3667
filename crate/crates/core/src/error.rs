use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CcrError {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("guard band {guard} must be smaller than dimension {dim}")]
    GuardTooLarge { guard: usize, dim: usize },

    #[error("support up to mode {top} needs at least {required} modes, have {dim}")]
    SupportViolation {
        top: usize,
        required: usize,
        dim: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value encountered at term k = {k}")]
    NumericOverflow { k: usize },

    #[error("series not converged (verdict {verdict}); refusing to sum")]
    NotConverged { verdict: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: residual {coarse:.3e} at m, {fine:.3e} at 2m")]
    GridTooCoarse { coarse: f64, fine: f64 },

    #[error("hermite recurrence unstable: mode {n} norm drifted by {drift:.3e}")]
    RecurrenceUnstable { n: usize, drift: f64 },

    #[error("eigensolver failure: {0}")]
    Eigensolver(String),

    #[error("limits exceeded: {0}")]
    LimitsExceeded(String),

    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { pos: usize, name: String },
}

pub type Result<T> = std::result::Result<T, CcrError>;
