use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("two-qubit gate targets must be distinct (got qubit {0} twice)")]
    DuplicateTarget(usize),

    #[error("gate `{label}` is not unitary (max |U†U - 1| entry = {deviation:e})")]
    NotUnitary { label: String, deviation: f64 },

    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected {expected} entries, found {found}")]
    InvalidLength { expected: usize, found: usize },

    #[error("Pauli string lists site {0} more than once")]
    DuplicateSite(usize),

    #[error("imaginary residue {0:e} exceeds tolerance; operator is not Hermitian")]
    ImaginaryResidue(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
