use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("covariance matrix of order {order} is not positive definite at working precision")]
    NotPositiveDefinite { order: usize },

    #[error("non-finite {what} on path {path} at step {step}; parameters blow up the scheme")]
    NonFinite {
        what: &'static str,
        path: usize,
        step: usize,
    },

    #[error("empty batch")]
    EmptyBatch,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("H", format!("{hurst} is outside (0, 1)")))
    }
}
