//! Planted-partition benchmark graphs and the bundled karate club fixture.
//!
//! The generator splits `n` nodes into `groups` equal blocks of consecutive
//! ids and draws every pair independently: with probability `p_in` inside a
//! block and `p_out` across blocks, where
//!
//! ```text
//! p_in  = (1 - mu) * avg_degree / (n / groups - 1)
//! p_out =       mu * avg_degree / (n - n / groups)
//! ```
//!
//! so each node expects `(1 - mu) d` internal and `mu d` external edges.
//! Pairs are visited block by block (`(a, b)` with `a <= b`, row-major) and
//! sampled by geometric skipping over a ChaCha8 stream seeded from `seed`, so
//! a given spec yields the same graph on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{load_graph, DirectedMode, Graph, GraphBuilder};
use crate::partition::Partition;

pub const KARATE_EDGES: &str = include_str!("../data/karate.tsv");
pub const KARATE_FACTIONS: &str = include_str!("../data/karate_factions.csv");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkSpec {
    pub n: usize,
    pub groups: usize,
    pub avg_degree: f64,
    pub mu: f64,
    pub seed: u64,
}

impl BenchmarkSpec {
    /// Within- and between-block pair probabilities.
    pub fn probabilities(&self) -> Result<(f64, f64)> {
        let fail = |msg: String| Err(Error::InfeasibleBenchmark(msg));
        if self.n == 0 || self.groups == 0 || !self.n.is_multiple_of(self.groups) {
            return fail(format!("{} nodes cannot form {} equal groups", self.n, self.groups));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return fail(format!("mixing parameter {} outside [0, 1]", self.mu));
        }
        if !(self.avg_degree >= 0.0 && self.avg_degree < self.n as f64) {
            return fail(format!("average degree {} must lie in [0, n)", self.avg_degree));
        }
        let size = self.n / self.groups;
        let internal = (1.0 - self.mu) * self.avg_degree;
        let external = self.mu * self.avg_degree;
        let p_in = ratio(internal, (size - 1) as f64);
        let p_out = ratio(external, (self.n - size) as f64);
        for (name, p) in [("p_in", p_in), ("p_out", p_out)] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} = {p} is not a probability"));
            }
        }
        Ok((p_in, p_out))
    }
}

fn ratio(expected: f64, slots: f64) -> f64 {
    if expected == 0.0 {
        0.0
    } else if slots == 0.0 {
        f64::INFINITY
    } else {
        expected / slots
    }
}

/// Number of failures before the next success of a Bernoulli(`p`) stream.
fn skip(rng: &mut ChaCha8Rng, p: f64) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    let r: f64 = rng.random();
    ((1.0 - r).ln() / (1.0 - p).ln()).floor() as u64
}

/// Calls `emit(k)` for each sampled index `k` in `0..slots`.
fn sample_block(rng: &mut ChaCha8Rng, slots: u64, p: f64, mut emit: impl FnMut(u64)) {
    if p <= 0.0 || slots == 0 {
        return;
    }
    let mut k = skip(rng, p);
    while k < slots {
        emit(k);
        k = k.saturating_add(1 + skip(rng, p));
    }
}

/// Generates the graph and its planted partition.
pub fn generate(spec: &BenchmarkSpec) -> Result<(Graph, Partition)> {
    let (p_in, p_out) = spec.probabilities()?;
    let size = spec.n / spec.groups;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges = Vec::new();

    for a in 0..spec.groups {
        let base_a = a * size;
        // pairs i < j inside the block, enumerated row by row
        let rows: Vec<u64> = (0..size as u64).map(|i| i * (i.saturating_sub(1)) / 2).collect();
        let within = (size as u64) * (size as u64).saturating_sub(1) / 2;
        sample_block(&mut rng, within, p_in, |k| {
            let j = rows.partition_point(|&start| start <= k) - 1;
            let i = (k - rows[j]) as usize;
            edges.push((base_a + i, base_a + j));
        });
        for b in a + 1..spec.groups {
            let base_b = b * size;
            sample_block(&mut rng, (size * size) as u64, p_out, |k| {
                let (i, j) = ((k / size as u64) as usize, (k % size as u64) as usize);
                edges.push((base_a + i, base_b + j));
            });
        }
    }
    edges.sort_unstable();

    let mut builder = GraphBuilder::new();
    for v in 1..=spec.n {
        builder.add_node(&v.to_string());
    }
    for (u, v) in edges {
        builder.add_edge(u, v, 1.0)?;
    }
    let graph = builder.build(DirectedMode::Undirected);
    let truth = Partition::from_labels((0..spec.n).map(|v| v / size));
    Ok((graph, truth))
}

/// Zachary's karate club (labels `1..=34`) with the observed two-faction split.
pub fn karate_fixture() -> (Graph, Partition) {
    let graph = load_graph(KARATE_EDGES, DirectedMode::Undirected)
        .expect("bundled karate edge list is well formed");
    let mut faction = vec![0usize; graph.node_count()];
    for line in KARATE_FACTIONS.lines().skip(1) {
        let (node, side) = line.split_once(',').expect("bundled faction file is well formed");
        let id = graph.node_by_label(node).expect("faction node exists");
        faction[id] = side.trim().parse().expect("faction id is an integer");
    }
    (graph, Partition::from_labels(faction))
}
