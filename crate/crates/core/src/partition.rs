//! Community labelings, the `com` indicator, modularity and partition distance.

use std::collections::HashMap;
use std::str::FromStr;

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// A total, non-overlapping labeling of nodes into communities `0..k`.
///
/// Labels are always canonical: communities are numbered by the first node
/// that belongs to them, so two partitions compare equal iff they group the
/// nodes identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Builds a partition from arbitrary community labels.
    pub fn from_labels<L: Eq + std::hash::Hash>(labels: impl IntoIterator<Item = L>) -> Self {
        let mut ids: HashMap<L, usize> = HashMap::new();
        let assignment = labels
            .into_iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Partition {
            assignment,
            k: ids.len(),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            k: n,
        }
    }

    pub fn single(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.k
    }

    pub fn community_of(&self, node: NodeId) -> usize {
        self.assignment[node]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn same_community(&self, i: NodeId, j: NodeId) -> bool {
        self.assignment[i] == self.assignment[j]
    }

    /// Node ids grouped by community, each list ascending.
    pub fn communities(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.k];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c].push(node);
        }
        out
    }

    pub(crate) fn check_covers(&self, g: &Graph) -> Result<()> {
        if self.len() != g.node_count() {
            return Err(Error::PartitionSize {
                expected: g.node_count(),
                found: self.len(),
            });
        }
        Ok(())
    }
}

/// Which side of the `com` indicator is kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComMode {
    #[default]
    Full,
    /// Cross-community pairs contribute 0.
    PositiveOnly,
    /// Same-community pairs (and `i == j`) contribute 0.
    NegativeOnly,
}

impl FromStr for ComMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "full" => Ok(ComMode::Full),
            "pos" | "positive" => Ok(ComMode::PositiveOnly),
            "neg" | "negative" => Ok(ComMode::NegativeOnly),
            other => Err(format!("unknown com mode `{other}` (expected full|pos|neg)")),
        }
    }
}

impl ComMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ComMode::Full => "full",
            ComMode::PositiveOnly => "pos",
            ComMode::NegativeOnly => "neg",
        }
    }
}

/// `+1` if `i == j` or both share a community, `-1` otherwise, with the
/// unwanted side zeroed according to `mode`.
#[inline]
pub fn com(p: &Partition, i: NodeId, j: NodeId, mode: ComMode) -> i32 {
    let same = i == j || p.same_community(i, j);
    match (same, mode) {
        (true, ComMode::NegativeOnly) => 0,
        (true, _) => 1,
        (false, ComMode::PositiveOnly) => 0,
        (false, _) => -1,
    }
}

/// Newman modularity `sum_c (e_cc - a_c^2)` on symmetrized weights.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    p.check_covers(g)?;
    let total = g.total_sym_weight();
    if total <= 0.0 {
        return Err(Error::EmptyGraph);
    }
    let mut internal = vec![0.0; p.community_count()];
    let mut endpoints = vec![0.0; p.community_count()];
    for j in 0..g.node_count() {
        let cj = p.community_of(j);
        for &(i, w) in g.sym_neighbors(j) {
            endpoints[cj] += w;
            if p.community_of(i) == cj {
                internal[cj] += w;
            }
        }
    }
    Ok(internal
        .iter()
        .zip(&endpoints)
        .map(|(&e, &a)| e / total - (a / total) * (a / total))
        .sum())
}

/// Minimum number of nodes whose removal makes the two induced partitions
/// identical, via maximum-weight matching on the cluster overlap matrix.
pub fn deletion_count(p: &Partition, q: &Partition) -> Result<usize> {
    if p.len() != q.len() {
        return Err(Error::MismatchedNodeSets(format!(
            "{} vs {} nodes",
            p.len(),
            q.len()
        )));
    }
    let n = p.len();
    if n == 0 {
        return Ok(0);
    }
    let (rows, cols, swap) = if p.community_count() <= q.community_count() {
        (p, q, false)
    } else {
        (q, p, true)
    };
    let mut overlap = Matrix::new(rows.community_count(), cols.community_count(), 0i64);
    for node in 0..n {
        let (a, b) = (p.community_of(node), q.community_of(node));
        let (r, c) = if swap { (b, a) } else { (a, b) };
        overlap[(r, c)] += 1;
    }
    let (retained, _) = kuhn_munkres(&overlap);
    Ok(n - retained as usize)
}

/// Transfer distance `n_D / n`.
pub fn partition_distance(p: &Partition, q: &Partition) -> Result<f64> {
    let n = p.len();
    let deleted = deletion_count(p, q)?;
    Ok(if n == 0 { 0.0 } else { deleted as f64 / n as f64 })
}
