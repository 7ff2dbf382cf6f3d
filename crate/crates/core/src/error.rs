use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown function id {0}; valid ids are 1..=23")]
    UnknownFunction(u8),

    #[error("f{function} does not accept dimension {got} ({expected})")]
    InvalidDimension {
        function: u8,
        got: usize,
        expected: String,
    },

    #[error("f{function}: coordinate {index} = {value} lies outside the search box")]
    OutOfBounds { function: u8, index: usize, value: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value {0} in ranking input")]
    NonFinite(f64),

    #[error("degenerate rank matrix: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
