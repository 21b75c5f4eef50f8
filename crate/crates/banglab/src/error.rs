use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("basis mismatch: expected {expected}, got {got}")]
    BasisMismatch { expected: String, got: String },

    #[error("time step too large: dt*max_rate = {0} must be < 1")]
    StepTooLarge(f64),

    #[error("dimension {0} exceeds limit {1} for exact mode")]
    DimensionOverflow(usize, usize),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}
