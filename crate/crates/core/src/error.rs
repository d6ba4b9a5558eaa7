use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {nrows}x{ncols}")]
    NotSquare { nrows: usize, ncols: usize },

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("zero pivot at (permuted) index {index}: |d| = {value:e}")]
    ZeroPivot { index: usize, value: f64 },

    #[error("generalized eigenproblem has a numerically singular Gram matrix")]
    SingularGram,

    #[error("invalid problem data: {0}")]
    InvalidProblem(String),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("unknown settings key `{0}`")]
    UnknownSetting(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("empty input: {0}")]
    Empty(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
