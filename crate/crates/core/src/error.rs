use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit index {0} listed more than once")]
    DuplicateTarget(usize),

    #[error("at least one qubit must be kept")]
    EmptyKeep,

    #[error("outcome has {actual} bits but {expected} qubits are measured")]
    OutcomeLength { expected: usize, actual: usize },

    #[error("impossible branch: squared norm {0:e} is below the zero-norm threshold")]
    ImpossibleBranch(f64),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("complex coefficients are not supported by {0}")]
    ComplexCoefficients(&'static str),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter { name, value, reason }
    }
}
