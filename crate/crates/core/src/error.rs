use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter m = {0} is outside the supported domain m < 1")]
    Domain(f64),
    #[error("non-finite argument: {0}")]
    Argument(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("regulator must be positive, got {0}")]
    Regulator(f64),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("missing capability: {0}")]
    Capability(String),
    #[error("invalid lattice configuration: {0}")]
    Configuration(String),
    #[error("field became non-finite at time step {step}")]
    Divergence { step: usize },
    #[error("momentum is lightlike (k^2 = {0}); transverse projector is singular")]
    Lightlike(f64),
    #[error("inconsistent construction: {0}")]
    Consistency(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
