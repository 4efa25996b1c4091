use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("operation requires a non-empty tree")]
    EmptyTree,
    #[error("cannot join an empty subtree")]
    EmptyOperand,
    #[error("leaf position {position} out of range (tree has {leaf_count} leaves)")]
    LeafOutOfRange { position: usize, leaf_count: usize },
    #[error("node position {position} out of range (tree has {node_count} nodes)")]
    NodeOutOfRange { position: usize, node_count: usize },
    #[error("preorder sequence does not encode a binary join tree")]
    Malformed,
    #[error("tree parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("terminal x{index} exceeds problem size n = {n}")]
    TerminalOutOfRange { index: u32, n: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("brute-force enumeration refused: {0}")]
    EnumerationLimit(String),
    #[error("growth fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
