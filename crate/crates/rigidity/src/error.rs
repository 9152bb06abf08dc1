use thiserror::Error;

use crate::graph::Edge;

/// Crate-wide error type. Variants are named after the contract they break.
#[derive(Debug, Error)]
pub enum Error {
    #[error("loop edge ({0}, {0})")]
    LoopEdge(u32),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("vertex {vertex} out of range 1..={max}")]
    VertexOutOfRange { vertex: u32, max: u32 },
    #[error("vertex {0} has no coordinates")]
    UnplacedVertex(u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: u32, max: u32 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("expression blowup: {terms} terms exceeds cap {cap}")]
    ExpressionBlowup { terms: usize, cap: usize },
    #[error("bracket width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("polynomial is not multi-homogeneous in the vertices")]
    NotMultiHomogeneous,
    #[error("edge {0} not in graph")]
    EdgeNotInGraph(Edge),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("search budget of {budget} candidates exceeded")]
    SearchBudgetExceeded { budget: u64 },
    #[error("invalid orientation: {0}")]
    InvalidOrientation(String),
    #[error("{sinks} sinks exceed {sources} sources; orientation is balanced by definition")]
    TooManySinks { sinks: usize, sources: usize },
    #[error("singular denominator at vertex {vertex}: placement is not generic enough")]
    SingularDenominator { vertex: u32 },
    #[error("source {0} receives inconsistent values from its two stream trees")]
    InconsistentSource(Edge),
    #[error("cannot reduce: rank {rank} is below the tight bound {bound}")]
    CannotReduce { rank: usize, bound: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
