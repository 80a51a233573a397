use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("inexact division: {0}")]
    InexactDivision(String),

    #[error("cannot specialize: {0}")]
    Specialize(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("invalid algebra spec: {0}")]
    InvalidSpec(String),

    #[error("rewrite budget of {0} steps exhausted")]
    RewriteBudget(usize),

    #[error("algebra mismatch: {0}")]
    SpecMismatch(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("inconsistent q-determinant: {0}")]
    InconsistentDeterminant(String),

    #[error("missing numeric assignment for `{0}`")]
    MissingAssignment(String),

    #[error("residual is nonzero: {0}")]
    Residual(String),

    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("json: {0}")]
    Json(String),
}
