use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("numerical blow-up at step {step} (t = {time})")]
    BlowUp { step: usize, time: f64 },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("time {t} is outside the validity horizon {horizon}")]
    Horizon { t: f64, horizon: f64 },
    #[error("under-resolved data: {0}")]
    Resolution(String),
    #[error("{} cube(s) still unsuitable at generation {max_generation}: {}", offenders.len(), offenders.join("; "))]
    Unresolved {
        max_generation: u32,
        offenders: Vec<String>,
    },
    #[error("out of range: {0}")]
    Range(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("missing dependency: {0}")]
    Dependency(String),
    #[error("case {index} (A = {amplitude}, nu = {nu}, ny = {ny}): {source}")]
    Case {
        index: usize,
        amplitude: f64,
        nu: f64,
        ny: usize,
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// The error without case context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Case { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_blow_up(&self) -> bool {
        match self {
            Error::BlowUp { .. } => true,
            Error::Case { source, .. } => source.is_blow_up(),
            _ => false,
        }
    }
}
