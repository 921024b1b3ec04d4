use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("self-loop on vertex {0} rejected")]
    SelfLoop(VertexId),
    #[error("non-positive weight {0} rejected")]
    NonPositiveWeight(f64),
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(VertexId, usize),
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("edge id {0} already present")]
    DuplicateEdge(EdgeId),
    #[error("parallel edge ({0}, {1}) rejected on a simple graph")]
    ParallelEdge(VertexId, VertexId),
    #[error("weight {0} below class base {1}")]
    WeightBelowBase(f64, f64),
    #[error("vertex sets do not match")]
    VertexSetMismatch,
    #[error("graphs have different connected components")]
    KernelMismatch,
    #[error("vertices {0} and {1} are disconnected")]
    Disconnected(VertexId, VertexId),
    #[error("{0} is not a vertex cover")]
    NotACover(VertexId),
    #[error("vertex {0} is already in the cover")]
    AlreadyInCover(VertexId),
    #[error("vertex {0} has a non-empty branch list")]
    BranchNonEmpty(VertexId),
    #[error("vertex {0} is in the cover")]
    InCover(VertexId),
    #[error("star {0} not present at this level")]
    UnknownStar(VertexId),
    #[error("star {0} already present at this level")]
    DuplicateStar(VertexId),
    #[error("forest mode mismatch")]
    ModeMismatch,
    #[error("edge ids overlap across parts")]
    OverlappingParts,
    #[error("degree of {0} exceeds bound {1}")]
    DegreeBound(VertexId, usize),
    #[error("{0}")]
    Invalid(String),
}
