use thiserror::Error;

use crate::graph::EdgeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge list is empty")]
    EmptyInput,
    #[error("edge {index} has non-positive or non-finite weight {weight}")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("edge {index} is a self-loop on vertex {vertex}")]
    SelfLoopInput { index: usize, vertex: u64 },
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {0} was contracted away")]
    DeadEdge(EdgeId),
    #[error("need at least {needed} vertices, graph has {found}")]
    TooFewVertices { needed: usize, found: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {0} given twice")]
    SameVertex(usize),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(usize),
    #[error("eliminated block is singular")]
    SingularBlock,
    #[error("graph too large for exhaustive enumeration (n = {n}, m = {m})")]
    TooLarge { n: usize, m: usize },
    #[error("laplacians do not share a null space")]
    NullSpaceMismatch,
    #[error("right-hand side is not orthogonal to the all-ones vector")]
    NotOrthogonal,
    #[error("random walk exceeded its step budget of {0}")]
    StepBudgetExceeded(u64),
    #[error("vertex {0} has no incident edges")]
    IsolatedVertex(usize),
    #[error("keep set must be a nonempty set of vertices")]
    EmptyKeep,
    #[error("level {level} outside 0..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pair {index} has an endpoint outside the graph or equal endpoints")]
    BadPair { index: usize },
    #[error("expected count {expected:.3} in some cell is below 10")]
    UndersampledCell { expected: f64 },
    #[error("internal failure: {0}")]
    Internal(String),
}
