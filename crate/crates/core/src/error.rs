use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("ragged rows: row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column}: {value:?} is not a non-negative integer")]
    InvalidCell {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("row {row}, column {column}: {value:?} is not a finite real number")]
    InvalidReal {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("at least {min} objects are required, got {found}")]
    TooFewObjects { min: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("k = {k} is out of range [{min}, {max}]")]
    KOutOfRange { k: usize, min: usize, max: usize },

    #[error("infeasible k = {k}: the graph has only {capacity} cluster nodes")]
    InfeasibleK { k: usize, capacity: usize },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
