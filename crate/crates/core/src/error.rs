use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RunupError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A requested abscissa range is not covered by the data.
    #[error("requested range [{requested_lo}, {requested_hi}] outside valid range [{valid_lo}, {valid_hi}]")]
    OutOfRange {
        requested_lo: f64,
        requested_hi: f64,
        valid_lo: f64,
        valid_hi: f64,
    },

    #[error("data error: {0}")]
    Data(String),

    /// The hodograph map is not invertible (the wave breaks).
    #[error("wave breaking: {detail} (margin {margin:.4})")]
    Breaking { detail: String, margin: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical instability: {0}")]
    Stability(String),
}

impl RunupError {
    pub fn is_breaking(&self) -> bool {
        matches!(self, RunupError::Breaking { .. })
    }
}

pub type Result<T> = std::result::Result<T, RunupError>;
