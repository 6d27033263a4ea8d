use thiserror::Error;

/// Errors produced by construction, validation, and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("completeness violated: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Completeness { residual: f64, tolerance: f64 },
    #[error("outcome index {index} out of range (set has {n_outcomes} outcomes)")]
    Index { index: usize, n_outcomes: usize },
    #[error("outcome probability {probability:.3e} too small to condition on")]
    ZeroProbability { probability: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("operator is degenerate (all singular values vanish)")]
    DegenerateOperator,
    #[error("outcome is not physically reversible (smallest singular value {lambda_min:.3e} <= {threshold:.3e})")]
    NonReversible { lambda_min: f64, threshold: f64 },
    #[error("measurement extracts information about the input; deterministic retrieval impossible")]
    InformationWasExtracted,
    #[error("non-finite entry encountered")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, Error>;
