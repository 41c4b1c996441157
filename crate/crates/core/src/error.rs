use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("operation is undefined on the zero state")]
    ZeroState,

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("schmidt rank {rank} outside 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("matrix is not Hermitian (max |Q - Q^H| = {0:e})")]
    NotHermitian(f64),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid branches: {0}")]
    InvalidBranches(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}

impl Error {
    pub(crate) fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}
