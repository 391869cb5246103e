use thiserror::Error;

/// Errors raised by the measures, scoring and statistics routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node `{0}` appears in the edge list but has no settlement attribution")]
    MissingAttribution(String),
    #[error("node `{node}` attributed to both `{first}` and `{second}`")]
    ConflictingAttribution {
        node: String,
        first: String,
        second: String,
    },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("graph has no edges; modularity is undefined")]
    NoEdges,
    #[error("partition covers {got} nodes but the graph has {expected}")]
    PartitionMismatch { expected: usize, got: usize },
    #[error("graph has {nodes} nodes, exhaustive search is limited to {limit}")]
    GraphTooLarge { nodes: usize, limit: usize },
    #[error("column `{0}` has zero variance")]
    ZeroVariance(String),
    #[error("design matrix is rank deficient; dependent columns: {0:?}")]
    RankDeficient(Vec<String>),
    #[error("need more observations than parameters (n = {n}, p = {p})")]
    TooFewObservations { n: usize, p: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("feature `{0}` is not in the model")]
    UnknownFeature(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
