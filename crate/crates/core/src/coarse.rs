//! Greedy modularity agglomeration (Clauset-Newman-Moore / fast Newman).
//!
//! Starts from singletons and repeatedly merges the pair of adjacent
//! communities with the largest modularity gain `2 (e_ab - a_a a_b)`. Every
//! merge is recorded, so the dendrogram can be cut at the modularity peak or
//! at a requested number of communities.
//!
//! Candidate pairs live in a max-heap with lazy invalidation: each community
//! carries a version that is bumped whenever its `a` value changes. Ties on
//! the gain go to the lexicographically smallest `(min id, max id)` pair and
//! the merged community keeps the smaller id.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStep {
    /// Surviving community (the smaller id).
    pub community_a: usize,
    /// Absorbed community.
    pub community_b: usize,
    pub delta_q: f64,
    pub q_after: f64,
}

#[derive(Debug, Clone)]
pub struct CoarseResult {
    /// Partition at the modularity peak of the merge path.
    pub partition: Partition,
    pub modularity: f64,
    /// Modularity of the all-singleton starting state.
    pub initial_modularity: f64,
    pub dendrogram: Vec<MergeStep>,
    /// Number of merges applied to reach `partition`.
    pub best_step: usize,
}

impl CoarseResult {
    /// Replays the first `steps` merges from singletons.
    pub fn partition_after(&self, steps: usize) -> Partition {
        let n = self.partition.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for step in &self.dendrogram[..steps.min(self.dendrogram.len())] {
            parent[step.community_b] = step.community_a;
        }
        Partition::from_labels((0..n).map(|mut x| {
            while parent[x] != x {
                x = parent[x];
            }
            x
        }))
    }

    /// Cuts the dendrogram where `k` communities remain, or at its end when
    /// the graph has more than `k` connected components.
    pub fn partition_with_communities(&self, k: usize) -> Partition {
        let n = self.partition.len();
        self.partition_after(n.saturating_sub(k.max(1)))
    }

    /// Modularity after `steps` merges.
    pub fn modularity_after(&self, steps: usize) -> f64 {
        match steps {
            0 => self.initial_modularity,
            s => self.dendrogram[s.min(self.dendrogram.len()) - 1].q_after,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    a: usize,
    b: usize,
    version_a: u32,
    version_b: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.a.cmp(&self.a))
            .then_with(|| other.b.cmp(&self.b))
    }
}

/// Agglomeration state: inter-community weight fractions `e_ab` and endpoint
/// fractions `a_a`, both normalized by the total symmetrized weight.
#[derive(Debug, Clone)]
pub struct Agglomeration {
    links: Vec<BTreeMap<usize, f64>>,
    endpoints: Vec<f64>,
    alive: Vec<bool>,
    version: Vec<u32>,
    q: f64,
}

impl Agglomeration {
    pub fn new(g: &Graph) -> Result<Self> {
        let total = g.total_sym_weight();
        if total <= 0.0 {
            return Err(Error::EmptyGraph);
        }
        let n = g.node_count();
        let mut links = vec![BTreeMap::new(); n];
        let mut endpoints = vec![0.0; n];
        let mut q = 0.0;
        for (j, slot) in links.iter_mut().enumerate() {
            let mut self_weight = 0.0;
            for &(i, w) in g.sym_neighbors(j) {
                endpoints[j] += w;
                if i == j {
                    self_weight = w;
                } else {
                    slot.insert(i, w / total);
                }
            }
            endpoints[j] /= total;
            q += self_weight / total - endpoints[j] * endpoints[j];
        }
        Ok(Agglomeration {
            links,
            endpoints,
            alive: vec![true; n],
            version: vec![0; n],
            q,
        })
    }

    pub fn modularity(&self) -> f64 {
        self.q
    }

    /// Modularity change from merging `a` and `b`.
    pub fn merge_gain(&self, a: usize, b: usize) -> Result<f64> {
        if a == b || !self.alive[a] || !self.alive[b] {
            return Err(Error::NotAdjacent(a, b));
        }
        let e = *self.links[a].get(&b).ok_or(Error::NotAdjacent(a, b))?;
        Ok(2.0 * (e - self.endpoints[a] * self.endpoints[b]))
    }

    fn candidate(&self, x: usize, y: usize) -> Candidate {
        let (a, b) = (x.min(y), x.max(y));
        Candidate {
            gain: 2.0 * (self.links[a][&b] - self.endpoints[a] * self.endpoints[b]),
            a,
            b,
            version_a: self.version[a],
            version_b: self.version[b],
        }
    }

    fn is_current(&self, c: &Candidate) -> bool {
        self.alive[c.a]
            && self.alive[c.b]
            && self.version[c.a] == c.version_a
            && self.version[c.b] == c.version_b
    }

    /// Merges `b` into `a` (`a < b`) and returns the gain applied.
    fn merge(&mut self, a: usize, b: usize) -> f64 {
        let gain = 2.0 * (self.links[a][&b] - self.endpoints[a] * self.endpoints[b]);
        let absorbed = std::mem::take(&mut self.links[b]);
        self.links[a].remove(&b);
        for (z, w) in absorbed {
            if z == a {
                continue;
            }
            *self.links[a].entry(z).or_insert(0.0) += w;
            let back = self.links[z].remove(&b).unwrap_or(0.0);
            *self.links[z].entry(a).or_insert(0.0) += back;
        }
        self.endpoints[a] += self.endpoints[b];
        self.endpoints[b] = 0.0;
        self.alive[b] = false;
        self.version[a] += 1;
        self.q += gain;
        gain
    }
}

/// Runs the full greedy agglomeration on the symmetrized weights of `g`.
pub fn coarse_detect(g: &Graph) -> Result<CoarseResult> {
    let mut state = Agglomeration::new(g)?;
    let n = g.node_count();
    let initial_modularity = state.modularity();

    let mut heap = BinaryHeap::new();
    for a in 0..n {
        for &b in state.links[a].keys() {
            if a < b {
                heap.push(state.candidate(a, b));
            }
        }
    }

    let mut dendrogram = Vec::with_capacity(n.saturating_sub(1));
    let mut best_q = initial_modularity;
    let mut best_step = 0;
    while let Some(top) = heap.pop() {
        if !state.is_current(&top) {
            continue;
        }
        let delta_q = state.merge(top.a, top.b);
        dendrogram.push(MergeStep {
            community_a: top.a,
            community_b: top.b,
            delta_q,
            q_after: state.q,
        });
        if state.q > best_q {
            best_q = state.q;
            best_step = dendrogram.len();
        }
        for &z in state.links[top.a].keys() {
            heap.push(state.candidate(top.a, z));
        }
    }

    let mut result = CoarseResult {
        partition: Partition::singletons(n),
        modularity: best_q,
        initial_modularity,
        dendrogram,
        best_step,
    };
    result.partition = result.partition_after(best_step);
    Ok(result)
}
