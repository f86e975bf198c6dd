use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state has an entry at k = 0")]
    ZeroMode,
    #[error("non-finite amplitude at k = {0}")]
    NonFinite(i64),
    #[error("state is not real-valued (Hermitian defect {0:e})")]
    NotReal(f64),
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("divergence: amplitude {amp:e} at t = {t}")]
    Diverged { t: f64, amp: f64 },
    #[error("need at least 3 recorded samples, got {0}")]
    TooFewSamples(usize),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("not contracting: difference ratio {0}")]
    NotContracting(f64),
    #[error("parameters outside the validity range of the bound: {0}")]
    OutOfRange(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
