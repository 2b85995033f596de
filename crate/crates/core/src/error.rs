use thiserror::Error;

/// Errors raised by the simulation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("duplicate register name `{0}`")]
    DuplicateRegister(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not a projector (deviation {0:.3e})")]
    NotProjector(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("registers must be distinct: `{0}`")]
    RegistersNotDistinct(String),

    #[error("qubit budget exceeded: {needed} qubits requested, limit {limit}")]
    BudgetExceeded { needed: usize, limit: usize },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, QError>;
