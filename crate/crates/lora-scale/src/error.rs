use thiserror::Error;

/// Errors surfaced by the analytical model and its configuration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(f64),

    #[error("distance {distance} m lies outside the cell of radius {radius} m")]
    OutOfCell { distance: f64, radius: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("planning failed: {0}")]
    Planning(String),

    #[error("numerical evaluation failed: {0}")]
    Numeric(String),

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("i/o error for {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
