//! Multi-step community detection.
//!
//! A fast greedy modularity agglomeration produces a coarse partition; cheap
//! per-node criticality scores flag nodes whose assignment looks doubtful;
//! a Girvan-Newman style edge-removal pass then reassigns only those nodes.

pub mod benchmark;
pub mod betweenness;
pub mod cli;
pub mod coarse;
pub mod error;
pub mod graph;
pub mod heuristics;
pub mod io;
pub mod partition;
pub mod pipeline;
pub mod refine;

pub use benchmark::{generate, karate_fixture, BenchmarkSpec};
pub use betweenness::{edge_betweenness, BetweennessTable};
pub use coarse::{coarse_detect, CoarseResult, MergeStep};
pub use error::{Error, Result};
pub use graph::{degree_table, load_graph, load_graph_file, q_factor, DegreeTable, DirectedMode, Graph, GraphBuilder, NodeId};
pub use heuristics::{
    combined_h, directed_h, h1_scores, h2_scores, heuristic_scores, select_critical,
    select_critical_fraction, CriticalSet, HeuristicScores,
};
pub use partition::{com, deletion_count, modularity, partition_distance, ComMode, Partition};
pub use pipeline::{run_pipeline, run_scores, PipelineConfig, PipelineReport, Threshold};
pub use refine::{refine, refine_traced, Refinement, RefinementState};
