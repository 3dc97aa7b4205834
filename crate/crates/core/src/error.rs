use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate arrow name `{0}`")]
    DuplicateArrow(String),

    #[error("arrow `{arrow}` refers to undeclared vertex {vertex}")]
    UndeclaredVertex { arrow: String, vertex: usize },

    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),

    #[error("word is not composable at position {position}")]
    NonComposable { position: usize },

    #[error("elements live over different quivers")]
    QuiverMismatch,

    #[error("{0}")]
    Usage(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("inadmissible r-matrix term: {0}")]
    Admissibility(String),

    #[error("invalid contraction: {0}")]
    InvalidPlan(String),

    #[error("symbolic expansion exceeds budget of {budget} terms")]
    BudgetExceeded { budget: usize },

    #[error("point outside the regularity domain: {0}")]
    Domain(String),

    #[error("non-finite numeric result")]
    NonFinite,

    #[error("internal error: {0}")]
    Internal(String),
}
