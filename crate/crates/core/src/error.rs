use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix data of length {len} is not a square of a positive integer")]
    NotSquare { len: usize },

    #[error("dimension {0} is not a power of two")]
    NotQubitDimension(usize),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid qubit selection {keep:?} for a {qubit_count}-qubit state")]
    InvalidKeepSet { keep: Vec<usize>, qubit_count: usize },

    #[error("channel has no Kraus operators")]
    EmptyChannel,

    #[error("Kraus set is incomplete (completeness residual {residual:e})")]
    IncompleteChannel { residual: f64 },

    #[error("post-selected branch is empty: probability {probability:e} below threshold {threshold:e}")]
    EmptyBranch { probability: f64, threshold: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate parameter point: P(-) below {threshold:e} over the whole time grid")]
    DegeneratePoint { threshold: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigensolver failed to converge")]
    EigenFailure,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
