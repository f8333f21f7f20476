use thiserror::Error;

#[derive(Debug, Error)]
pub enum QcatError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("matrix is not symplectic: {0}")]
    NotSymplectic(String),
    #[error("matrix is not quantizable: {0}")]
    NotQuantizable(String),
    #[error("ill-conditioned spectrum: {0}")]
    IllConditionedSpectrum(String),
    #[error("unsupported frame: {0}")]
    UnsupportedFrame(String),
    #[error("kappa consistency failure: {0}")]
    ConsistencyFailure(String),
    #[error("propagator construction failure: {0}")]
    ConstructionFailure(String),
    #[error("aliasing error: band {band} >= N/2 = {limit}")]
    Aliasing { band: i64, limit: f64 },
    #[error("eigendecomposition failure: {0}")]
    DecompositionFailure(String),
    #[error("partition coverage error: {0}")]
    Coverage(String),
    #[error("refinement aliasing: {0}")]
    RefinementAliasing(String),
    #[error("invalid partition of identity: {0}")]
    InvalidPartition(String),
    #[error("quantizer positivity violation: {0}")]
    QuantizerPositivity(String),
    #[error("math invariant failure: {0}")]
    MathInvariant(String),
    #[error("resource budget exceeded: {0}")]
    ResourceBudget(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, QcatError>;

impl QcatError {
    /// CLI exit code classes: 2 validation, 3 math invariant, 4 resource budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            QcatError::Dimension(_)
            | QcatError::Validation(_)
            | QcatError::NotSymplectic(_)
            | QcatError::NotQuantizable(_)
            | QcatError::Aliasing { .. }
            | QcatError::Io(_)
            | QcatError::Format(_)
            | QcatError::Coverage(_)
            | QcatError::RefinementAliasing(_) => 2,
            QcatError::ResourceBudget(_) => 4,
            _ => 3,
        }
    }
}
