//! CSV/JSON artifacts: partitions, scores, dendrograms.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::coarse::CoarseResult;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::heuristics::{CriticalSet, HeuristicScores};
use crate::partition::Partition;

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// 12 significant digits, shortest round-trip rendering (`0.0`, `0.0294117647059`, `1e-20`).
pub fn fmt_real(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0.0".to_owned()
    } else {
        format!("{r:?}")
    }
}

pub fn write_partition<W: Write>(g: &Graph, p: &Partition, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "community"])?;
    for v in 0..g.node_count() {
        w.write_record([g.label(v), &p.community_of(v).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Node labels with their (canonicalized) partition, as read from a
/// `node,community` file.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPartition {
    pub labels: Vec<String>,
    pub partition: Partition,
}

impl LabeledPartition {
    /// Reorders `other` to this partition's label order.
    pub fn align(&self, other: &LabeledPartition) -> Result<Partition> {
        if self.labels.len() != other.labels.len() {
            return Err(Error::MismatchedNodeSets(format!(
                "{} vs {} nodes",
                self.labels.len(),
                other.labels.len()
            )));
        }
        let index: HashMap<&str, usize> = other
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut communities = Vec::with_capacity(self.labels.len());
        for label in &self.labels {
            let &i = index.get(label.as_str()).ok_or_else(|| {
                Error::MismatchedNodeSets(format!("node `{label}` missing from second partition"))
            })?;
            communities.push(other.partition.community_of(i));
        }
        Ok(Partition::from_labels(communities))
    }

    /// The partition in `g`'s node order.
    pub fn for_graph(&self, g: &Graph) -> Result<Partition> {
        let graph_side = LabeledPartition {
            labels: g.labels().to_vec(),
            partition: Partition::singletons(g.node_count()),
        };
        graph_side.align(self)
    }
}

pub fn read_partition<R: Read>(input: R) -> Result<LabeledPartition> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "node" || &headers[1] != "community" {
        return Err(Error::Parse {
            line: 1,
            message: "expected header `node,community`".into(),
        });
    }
    let mut labels = Vec::new();
    let mut communities = Vec::new();
    let mut seen = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = i + 2;
        if record.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        if seen.insert(record[0].to_owned(), ()).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("node `{}` listed twice", &record[0]),
            });
        }
        labels.push(record[0].to_owned());
        communities.push(record[1].to_owned());
    }
    Ok(LabeledPartition {
        labels,
        partition: Partition::from_labels(communities),
    })
}

pub fn read_partition_file(path: impl AsRef<Path>) -> Result<LabeledPartition> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::file(path, e))?;
    read_partition(file)
}

/// `node,h1,h2,h,isolated,critical`, one row per node.
pub fn write_scores<W: Write>(
    g: &Graph,
    scores: &HeuristicScores,
    critical: &CriticalSet,
    out: W,
) -> Result<()> {
    let mask = critical.mask(g.node_count());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "h1", "h2", "h", "isolated", "critical"])?;
    for v in 0..g.node_count() {
        w.write_record([
            g.label(v).to_owned(),
            fmt_real(scores.h1[v]),
            fmt_real(scores.h2[v]),
            fmt_real(scores.h[v]),
            scores.isolated[v].to_string(),
            mask[v].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `step,commA,commB,deltaQ,qAfter`; community ids are internal node ids of
/// the surviving/absorbed community representatives, written as labels.
pub fn write_dendrogram<W: Write>(g: &Graph, coarse: &CoarseResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "commA", "commB", "deltaQ", "qAfter"])?;
    for (i, step) in coarse.dendrogram.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            g.label(step.community_a).to_owned(),
            g.label(step.community_b).to_owned(),
            fmt_real(step.delta_q),
            fmt_real(step.q_after),
        ])?;
    }
    w.flush()?;
    Ok(())
}
