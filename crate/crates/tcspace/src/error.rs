//! Crate-wide error type. Every validation failure is a dedicated variant so
//! callers (and the CLI) can map failures to stable machine-readable codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is not square: row {row} has length {len}, expected {expected}")]
    ShapeMismatch { row: usize, len: usize, expected: usize },
    #[error("distance matrix is asymmetric at ({i}, {j})")]
    AsymmetricMatrix { i: usize, j: usize },
    #[error("negative or non-finite distance at ({i}, {j})")]
    NegativeDistance { i: usize, j: usize },
    #[error("nonzero diagonal entry at point {0}")]
    NonzeroDiagonal(usize),
    #[error("distinct points {i} and {j} are at distance zero")]
    ZeroDistanceDistinctPoints { i: usize, j: usize },
    #[error("triangle inequality violated on ({i}, {j}, {k})")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("vertex {vertex} out of range for size {size}")]
    VertexOutOfRange { vertex: usize, size: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    NonPositiveWeight { u: usize, v: usize, weight: f64 },
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("invalid size for family {family}: {n}")]
    InvalidSize { family: String, n: usize },
    #[error("coefficients do not sum to zero (sum = {sum})")]
    NonZeroSum { sum: f64 },
    #[error("measure is zero")]
    ZeroMeasure,
    #[error("measure is not a probability distribution: {reason}")]
    NotProbability { reason: String },
    #[error("molecular term {term} is invalid: {reason}")]
    InvalidTerm { term: usize, reason: String },
    #[error("function is not 1-Lipschitz: slope {slope} on pair ({i}, {j})")]
    NotOneLipschitz { i: usize, j: usize, slope: f64 },
    #[error("point sets have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("matrix is not doubly stochastic: {reason}")]
    NotDoublyStochastic { reason: String },
    #[error("graph is not a tree: {reason}")]
    NotATree { reason: String },
    #[error("oriented edge ({parent}, {child}) is not in the tree")]
    EdgeNotInTree { parent: usize, child: usize },
    #[error("keep set is empty")]
    EmptyKeepSet,
    #[error("component {0} of the embedding is not injective on base points")]
    NonBijectiveComponents(usize),
    #[error("vertex sequence is not a walk: step {step} joins non-adjacent vertices {u} and {v}")]
    NotAWalk { step: usize, u: usize, v: usize },
    #[error("vector field is not conservative: cycle through edge ({u}, {v}) has integral {integral}")]
    NotConservative { u: usize, v: usize, integral: f64 },
    #[error("embedding is not canonical over the graph: {reason}")]
    EmbeddingNotCanonical { reason: String },
    #[error("supplied path for tree edge ({u}, {v}) is invalid: {reason}")]
    PathMismatch { u: usize, v: usize, reason: String },
    #[error("vertex set of size {size} exceeds the exhaustive enumeration cap of {cap}")]
    TooLargeForExhaustive { size: usize, cap: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("edge measure is invalid: {reason}")]
    InvalidEdgeMeasure { reason: String },
    #[error("empty subset")]
    EmptySubset,
}
