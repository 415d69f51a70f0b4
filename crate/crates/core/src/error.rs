use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for mode {mode} (dimension {dim})")]
    Bounds { mode: usize, index: usize, dim: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid mode partition: {0}")]
    Partition(String),

    #[error("wrong number of operands: {0}")]
    Arity(String),

    #[error("singular or ill-conditioned matrix: {0}")]
    Singular(String),

    #[error("model not identifiable: {message} (deficient columns {columns:?})")]
    Identifiability { message: String, columns: Vec<usize> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}
