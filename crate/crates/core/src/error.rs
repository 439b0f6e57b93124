use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("{0}")]
    Domain(String),

    #[error("invalid query set: {0}")]
    InvalidQuery(String),

    #[error("invalid problem parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle refuses graph with {n} vertices (enumeration guard is {limit})")]
    OracleGuard { n: usize, limit: usize },

    #[error("cannot generate query set: {0}")]
    Unsatisfiable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
