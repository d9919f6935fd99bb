use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph contains a directed cycle")]
    CyclicGraph,
    #[error("unknown variable: {0}")]
    UnknownVariable(String),
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("orientation rules force both directions of {0} -- {1}")]
    ConflictingOrientation(String, String),
    #[error("Legendre index must be non-negative, got {0}")]
    NegativeIndex(i64),
    #[error("continuous column `{0}` is constant")]
    ConstantColumn(String),
    #[error("categorical column `{0}` observes fewer than two categories")]
    DegenerateCategory(String),
    #[error("variable `{0}` has an empty embedded block")]
    DegenerateVariable(String),
    #[error("linear system is singular even after regularization")]
    SingularSystem,
    #[error("chi-square degrees of freedom must be >= 1, got {0}")]
    InvalidDof(i64),
    #[error("invalid distribution shape: {0}")]
    InvalidShape(String),
    #[error("cannot place {edges} edges on {nodes} nodes")]
    TooManyEdges { nodes: usize, edges: usize },
    #[error("graphs do not share the same variables")]
    VariableMismatch,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRows {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("missing value in column `{column}` at row {row}")]
    MissingValues { column: String, row: usize },
    #[error("variable `{0}` appears in more than one tier")]
    DuplicateTierMembership(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("search exceeded the time limit of {0:.1} s")]
    TimeoutExceeded(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
