use thiserror::Error;

/// Errors produced by mesh construction, operators and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree error: {0}")]
    Degree(String),

    #[error("dimension mismatch: {0}")]
    Mismatch(String),

    #[error("invalid metric: {0}")]
    Metric(String),

    #[error("degenerate cell {cell}: volume {volume:e}")]
    DegenerateCell { cell: usize, volume: f64 },

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("invalid field: {0}")]
    Field(String),

    #[error("solver: {0}")]
    Solver(String),

    #[error("incompatible data: {0}")]
    Incompatible(String),

    #[error("diagnostic: {0}")]
    Diagnostic(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
