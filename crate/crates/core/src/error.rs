use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid graphon: {0}")]
    InvalidGraphon(String),

    #[error("invalid graphon signal: {0}")]
    InvalidSignal(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("matrix is not symmetric (max |S_ij - S_ji| = {0:e})")]
    NotSymmetric(f64),

    #[error("{name} = {value} is out of range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("empty band: no eigenvalue with |lambda| >= {c}")]
    EmptyBand { c: f64 },

    #[error("scale mismatch: decomposition is {have:?}, requested {want:?}")]
    ScaleMismatch {
        have: crate::spectral::Scale,
        want: crate::spectral::Scale,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("assumption {which} fails: {reason}")]
    AssumptionFailed { which: &'static str, reason: String },

    #[error("homomorphism enumeration over {maps:e} maps exceeds the limit of {limit:e}")]
    SizeExplosion { maps: f64, limit: f64 },

    #[error("training diverged at step {step}: loss {loss:e}")]
    Diverged { step: usize, loss: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
