use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field has non-zero mean {mean:e}; negative powers act on mean-zero fields only")]
    NonZeroMean { mean: f64 },

    #[error("order k = {0} out of range 1..=8")]
    OrderOutOfRange(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("history holds {have} of {need} entries; bootstrap before multistep stepping")]
    IncompleteHistory { have: usize, need: usize },

    #[error("non-finite state at t = {t} after {steps} steps")]
    BlowUp { t: f64, steps: u64 },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("insufficient retained history for the modified energy: {have} of {need} intervals")]
    InsufficientIntervals { have: usize, need: usize },

    #[error("u and v coincide; Lipschitz ratio undefined")]
    IdenticalFields,

    #[error("invalid fit: {0}")]
    InvalidFit(String),

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
