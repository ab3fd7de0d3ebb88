use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("block sizes must be strictly increasing: level {index} has size {size}, previous is {prev}")]
    NonMonotoneSizes { index: usize, prev: u64, size: u64 },
    #[error("block size at level {index} must be positive")]
    ZeroSize { index: usize },
    #[error("tree depth {depth} exceeds the supported maximum {max}")]
    DepthTooLarge { depth: u32, max: u32 },
    #[error("ring degree k = {k} must be even, positive, and smaller than n = {n}")]
    BadDegree { k: usize, n: usize },
    #[error("{0}")]
    BadParameter(String),
    #[error("node {node} is reachable through more than one parent; input is not a tree")]
    NotATree { node: usize },
    #[error("graph is not a complete binary tree")]
    NotCompleteBinary,
    #[error("root slot {index} references invalid node {node}")]
    UnreachableRootSlot { index: usize, node: usize },
    #[error("layout carries no region metadata (not produced by a blocking engine)")]
    MissingRegions,
    #[error("workload incompatible with this graph: {0}")]
    IncompatibleWorkload(String),
}
