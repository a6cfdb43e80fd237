use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}: expected {expected} cells, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("row {row}, column {column}: {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("label column {0} not found")]
    MissingLabelColumn(String),

    #[error("no instances")]
    NoInstances,

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("requested {requested} instances but only {available} are available")]
    InsufficientData { requested: usize, available: usize },

    #[error("degenerate statistics: {0}")]
    DegenerateStatistics(String),

    #[error("zero covariance: all instances are identical")]
    ZeroCovariance,

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
