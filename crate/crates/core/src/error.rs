use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("label groups overlap on `{0}`")]
    OverlappingGroups(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("total dimension {dim} exceeds the configured cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("channel is not trace preserving (completeness residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("channel structure: {0}")]
    Structure(String),

    #[error("input states are not of product form: {0}")]
    NonProductInput(String),

    #[error("degenerate codebook: {0}")]
    DegenerateCodebook(String),

    #[error("no feasible point found (smallest constraint violation {violation:.3e}, tolerance {tolerance:.3e})")]
    Infeasible { violation: f64, tolerance: f64 },

    #[error("enumeration cap exceeded: {0}")]
    EnumerationCap(String),

    #[error("malformed input file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
