use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("invalid basis size {0}: at least 2 levels are required")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("cannot normalize a zero-norm state")]
    ZeroNorm,

    #[error("state is not normalized (norm = {0})")]
    Unnormalized(f64),

    #[error("truncation insufficient for {what}: {detail}")]
    TruncationInsufficient { what: String, detail: String },

    #[error("matrix exponential did not converge: {0}")]
    NonConvergence(String),

    #[error("invalid parameter {name}: {detail}")]
    InvalidParameter { name: &'static str, detail: String },
}

impl FockError {
    pub(crate) fn truncation(what: impl Into<String>, detail: impl Into<String>) -> Self {
        FockError::TruncationInsufficient {
            what: what.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn param(name: &'static str, detail: impl Into<String>) -> Self {
        FockError::InvalidParameter {
            name,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, FockError>;
