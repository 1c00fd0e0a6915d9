//! Coarse clustering, criticality scoring, refinement and metrics, wired together.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::coarse::{coarse_detect, CoarseResult};
use crate::error::{Error, Result};
use crate::graph::{degree_table, DirectedMode, Graph};
use crate::heuristics::{
    directed_h, heuristic_scores, select_critical, select_critical_fraction, CriticalSet,
    HeuristicScores,
};
use crate::io::{round_sig, write_dendrogram, write_partition, write_scores};
use crate::partition::{modularity, partition_distance, ComMode, Partition};
use crate::refine::{refine_traced, write_trace, TraceEntry};

/// How critical nodes are picked from the combined score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// `H < value`.
    Absolute(f64),
    /// The given share of lowest-scoring nodes.
    Fraction(f64),
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::Absolute(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub alpha: f64,
    pub threshold: Threshold,
    pub com_mode: ComMode,
    pub min_new_community: usize,
    /// Applied when loading from an edge list; `run_pipeline` takes the graph as given.
    pub directed: DirectedMode,
    /// Cut the coarse dendrogram at this many communities instead of at peak modularity.
    pub communities: Option<usize>,
    pub emit: Option<PathBuf>,
    pub trace: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            alpha: 1.0,
            threshold: Threshold::default(),
            com_mode: ComMode::Full,
            min_new_community: 2,
            directed: DirectedMode::Auto,
            communities: None,
            emit: None,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StageTimings {
    pub coarse: u64,
    pub heuristics: u64,
    pub refinement: u64,
    pub metrics: u64,
}

fn millis(d: Duration) -> u64 {
    d.as_millis() as u64
}

/// Output of the first two stages.
#[derive(Debug, Clone)]
pub struct ScoreReport {
    pub coarse: CoarseResult,
    pub coarse_partition: Partition,
    pub scores: HeuristicScores,
    pub critical: CriticalSet,
    pub timings: StageTimings,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub coarse: CoarseResult,
    pub coarse_partition: Partition,
    pub refined_partition: Partition,
    pub scores: HeuristicScores,
    pub critical: CriticalSet,
    pub distance: f64,
    pub modularity_coarse: f64,
    pub modularity_refined: f64,
    pub critical_count: usize,
    pub trace: Vec<TraceEntry>,
    pub timings: StageTimings,
}

#[derive(Debug, Serialize)]
struct ReportJson<'a> {
    coarse_modularity: f64,
    refined_modularity: f64,
    distance: f64,
    critical_count: usize,
    critical_nodes: Vec<&'a str>,
    timings_ms: StageTimings,
}

impl PipelineReport {
    pub fn to_json(&self, g: &Graph) -> Result<String> {
        let json = ReportJson {
            coarse_modularity: round_sig(self.modularity_coarse),
            refined_modularity: round_sig(self.modularity_refined),
            distance: round_sig(self.distance),
            critical_count: self.critical_count,
            critical_nodes: self.critical.nodes.iter().map(|&v| g.label(v)).collect(),
            timings_ms: self.timings,
        };
        let mut text = serde_json::to_string_pretty(&json)?;
        text.push('\n');
        Ok(text)
    }
}

/// Coarse partition, scores and critical set.
pub fn run_scores(g: &Graph, cfg: &PipelineConfig) -> Result<ScoreReport> {
    let start = Instant::now();
    let coarse = coarse_detect(g).map_err(|e| e.in_stage("coarse"))?;
    let coarse_partition = match cfg.communities {
        Some(k) => coarse.partition_with_communities(k),
        None => coarse.partition.clone(),
    };
    let coarse_time = start.elapsed();

    let start = Instant::now();
    let scores = if g.is_directed() {
        directed_h(g, &degree_table(g), &coarse_partition, cfg.com_mode, cfg.alpha)
    } else {
        heuristic_scores(g, &coarse_partition, cfg.com_mode, cfg.alpha)
    }
    .map_err(|e| e.in_stage("heuristics"))?;
    let critical = match cfg.threshold {
        Threshold::Absolute(t) => select_critical(g, &scores, t),
        Threshold::Fraction(f) => {
            select_critical_fraction(g, &scores, f).map_err(|e| e.in_stage("heuristics"))?
        }
    };
    let timings = StageTimings {
        coarse: millis(coarse_time),
        heuristics: millis(start.elapsed()),
        ..Default::default()
    };
    Ok(ScoreReport {
        coarse,
        coarse_partition,
        scores,
        critical,
        timings,
    })
}

pub fn run_pipeline(g: &Graph, cfg: &PipelineConfig) -> Result<PipelineReport> {
    let scored = run_scores(g, cfg)?;
    let mut timings = scored.timings;

    let start = Instant::now();
    let refinement = refine_traced(
        g,
        &scored.coarse_partition,
        &scored.critical,
        cfg.min_new_community,
    )
    .map_err(|e| e.in_stage("refinement"))?;
    timings.refinement = millis(start.elapsed());

    let start = Instant::now();
    let metrics = || -> Result<(f64, f64, f64)> {
        Ok((
            partition_distance(&scored.coarse_partition, &refinement.partition)?,
            modularity(g, &scored.coarse_partition)?,
            modularity(g, &refinement.partition)?,
        ))
    };
    let (distance, modularity_coarse, modularity_refined) =
        metrics().map_err(|e| e.in_stage("metrics"))?;
    timings.metrics = millis(start.elapsed());

    let report = PipelineReport {
        critical_count: scored.critical.len(),
        coarse: scored.coarse,
        coarse_partition: scored.coarse_partition,
        refined_partition: refinement.partition.clone(),
        scores: scored.scores,
        critical: scored.critical,
        distance,
        modularity_coarse,
        modularity_refined,
        trace: refinement.trace().to_vec(),
        timings,
    };
    if let Some(dir) = &cfg.emit {
        write_report(g, &report, dir, cfg.trace).map_err(|e| e.in_stage("output"))?;
    }
    Ok(report)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| Error::file(path, e))
}

pub fn write_score_files(g: &Graph, report: &ScoreReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    write_partition(g, &report.coarse_partition, create(dir, "coarse.csv")?)?;
    write_scores(g, &report.scores, &report.critical, create(dir, "scores.csv")?)?;
    write_dendrogram(g, &report.coarse, create(dir, "dendrogram.csv")?)?;
    Ok(())
}

/// Writes `coarse.csv`, `refined.csv`, `scores.csv`, `dendrogram.csv`,
/// `report.json` and optionally `trace.csv` into `dir`.
pub fn write_report(g: &Graph, report: &PipelineReport, dir: &Path, trace: bool) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::file(dir, e))?;
    write_partition(g, &report.coarse_partition, create(dir, "coarse.csv")?)?;
    write_partition(g, &report.refined_partition, create(dir, "refined.csv")?)?;
    write_scores(g, &report.scores, &report.critical, create(dir, "scores.csv")?)?;
    write_dendrogram(g, &report.coarse, create(dir, "dendrogram.csv")?)?;
    let path = dir.join("report.json");
    fs::write(&path, report.to_json(g)?).map_err(|e| Error::file(path, e))?;
    if trace {
        write_trace(g, &report.trace, create(dir, "trace.csv")?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_graph, DirectedMode};

    #[test]
    fn disjoint_cliques_skip_refinement() {
        let g = load_graph("1 2\n2 3\n3 1\n4 5\n5 6\n6 4", DirectedMode::Auto).unwrap();
        let r = run_pipeline(&g, &PipelineConfig::default()).unwrap();
        assert_eq!(r.critical_count, 0);
        assert_eq!(r.distance, 0.0);
        assert_eq!(r.coarse_partition, r.refined_partition);
        assert!(r.trace.is_empty());
    }

    #[test]
    fn stage_errors_are_labelled() {
        let mut b = crate::graph::GraphBuilder::new();
        b.add_node("solo");
        let g = b.build(DirectedMode::Undirected);
        let err = run_pipeline(&g, &PipelineConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "coarse", .. }));
        let g = load_graph("1 2", DirectedMode::Auto).unwrap();
        let cfg = PipelineConfig {
            alpha: 3.0,
            ..Default::default()
        };
        let err = run_pipeline(&g, &cfg).unwrap_err();
        assert!(matches!(err, Error::Stage { stage: "heuristics", .. }));
        assert!(err.to_string().starts_with("heuristics stage failed"));
    }

    #[test]
    fn directed_graphs_use_directed_scores() {
        let g = load_graph("1 2 2\n2 1\n2 3\n3 1\n3 4\n4 5\n5 6\n6 4 3", DirectedMode::Auto).unwrap();
        assert!(g.is_directed());
        let r = run_pipeline(&g, &PipelineConfig::default()).unwrap();
        let expected = directed_h(&g, &degree_table(&g), &r.coarse_partition, ComMode::Full, 1.0).unwrap();
        assert_eq!(r.scores, expected);
    }

    #[test]
    fn report_json_keys() {
        let g = load_graph("1 2\n2 3\n3 1\n3 4", DirectedMode::Auto).unwrap();
        let r = run_pipeline(&g, &PipelineConfig::default()).unwrap();
        let value: serde_json::Value = serde_json::from_str(&r.to_json(&g).unwrap()).unwrap();
        let keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = vec![
            "coarse_modularity",
            "critical_count",
            "critical_nodes",
            "distance",
            "refined_modularity",
            "timings_ms",
        ];
        expected.sort_unstable();
        let mut keys_sorted = keys.clone();
        keys_sorted.sort_unstable();
        assert_eq!(keys_sorted, expected);
    }
}
