use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph with {n} vertices exceeds the supported maximum of {max}")]
    Capacity { n: usize, max: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pair ({0}, {1}) is not an edge")]
    MissingEdge(usize, usize),

    #[error("pair ({0}, {1}) is already an edge")]
    ExistingEdge(usize, usize),

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("pair ({0}, {1}) appears in both the removal and the addition list")]
    ConflictingEdit(usize, usize),

    #[error("no root in (0,1): {0}")]
    NoRoot(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
