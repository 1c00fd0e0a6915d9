use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: edge weight must be strictly positive and finite, got {weight}")]
    InvalidWeight { line: usize, weight: f64 },

    #[error("graph has no nodes")]
    NoNodes,

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("degenerate graph: every node is isolated")]
    DegenerateGraph,

    #[error("alpha must lie in [0, 2], got {0}")]
    AlphaOutOfRange(f64),

    #[error("critical fraction must lie in [0, 1], got {0}")]
    FractionOutOfRange(f64),

    #[error("partition covers {found} nodes, graph has {expected}")]
    PartitionSize { expected: usize, found: usize },

    #[error("partitions are defined over different node sets: {0}")]
    MismatchedNodeSets(String),

    #[error("communities {0} and {1} share no edge")]
    NotAdjacent(usize, usize),

    #[error("infeasible benchmark: {0}")]
    InfeasibleBenchmark(String),

    #[error("inconsistent refinement state: {reason}\n{dump}")]
    InconsistentRefinement { reason: String, dump: String },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::File {
            path: path.into(),
            source,
        }
    }
}
