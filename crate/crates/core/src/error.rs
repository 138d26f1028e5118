use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("trajectory became unstable at step {step}: {reason}")]
    Unstable { step: usize, reason: String },

    /// Schema violations in a configuration file; `keys` lists every offending key.
    #[error("config error ({}): {message}", keys.join(", "))]
    Config { keys: Vec<String>, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
