//! Immutable weighted graph, edge-list loading and degree statistics.
//!
//! Nodes carry their original text label and a dense internal id assigned in
//! first-appearance order. Every computation that ignores direction works on
//! the symmetrized weights `s_ij = (a_ij + a_ji) / 2`; the refinement stage
//! additionally uses the simple undirected skeleton (one entry per unordered
//! pair of distinct endpoints).

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Dense 0-based node index.
pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub weight: f64,
}

/// How to decide whether a loaded edge list is directed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DirectedMode {
    /// Directed iff some pair is listed in both orientations with different weights.
    #[default]
    Auto,
    Directed,
    Undirected,
}

impl FromStr for DirectedMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(DirectedMode::Auto),
            "on" | "directed" => Ok(DirectedMode::Directed),
            "off" | "undirected" => Ok(DirectedMode::Undirected),
            other => Err(format!("unknown directed mode `{other}` (expected auto|on|off)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    labels: Vec<String>,
    directed: bool,
    edges: Vec<Edge>,
    /// Per node, `(i, s_ij)` over distinct neighbours sorted by id; self-loop included.
    sym: Vec<Vec<(NodeId, f64)>>,
    /// Per node `j`, `(i, a_ij)` for edges `i -> j`.
    in_adj: Vec<Vec<(NodeId, f64)>>,
    /// Per node `j`, `(k, a_jk)` for edges `j -> k`.
    out_adj: Vec<Vec<(NodeId, f64)>>,
    pairs: Vec<(NodeId, NodeId)>,
    pair_of_edge: Vec<Option<usize>>,
    pair_adj: Vec<Vec<(NodeId, usize)>>,
}

impl Graph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of stored edges: unordered pairs for undirected graphs, ordered pairs otherwise.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.labels[node]
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.labels.iter().position(|l| l == label)
    }

    /// Symmetrized neighbourhood of `node`: `(i, s_ij)` sorted by `i`.
    pub fn sym_neighbors(&self, node: NodeId) -> &[(NodeId, f64)] {
        &self.sym[node]
    }

    pub fn in_neighbors(&self, node: NodeId) -> &[(NodeId, f64)] {
        &self.in_adj[node]
    }

    pub fn out_neighbors(&self, node: NodeId) -> &[(NodeId, f64)] {
        &self.out_adj[node]
    }

    /// Stored weight `a_ij` of the edge `i -> j` (either orientation when undirected).
    pub fn weight(&self, i: NodeId, j: NodeId) -> f64 {
        self.out_adj[i]
            .iter()
            .find(|&&(k, _)| k == j)
            .map_or(0.0, |&(_, w)| w)
    }

    /// Unordered pairs `(u, v)`, `u < v`, of the simple undirected skeleton, in
    /// first-appearance order of their underlying edges.
    pub fn pairs(&self) -> &[(NodeId, NodeId)] {
        &self.pairs
    }

    /// Skeleton pair carrying edge `edge`; `None` for self-loops.
    pub fn pair_of_edge(&self, edge: usize) -> Option<usize> {
        self.pair_of_edge[edge]
    }

    /// Skeleton neighbourhood of `node`: `(neighbour, pair id)`.
    pub fn pair_neighbors(&self, node: NodeId) -> &[(NodeId, usize)] {
        &self.pair_adj[node]
    }

    /// Sum of all symmetrized weights over ordered pairs, `sum_ij s_ij`.
    pub fn total_sym_weight(&self) -> f64 {
        self.sym.iter().flatten().map(|&(_, w)| w).sum()
    }

    /// The undirected graph with weights `s_ij`.
    pub fn symmetrized(&self) -> Graph {
        let mut builder = GraphBuilder::new();
        for label in &self.labels {
            builder.add_node(label);
        }
        for (j, nbrs) in self.sym.iter().enumerate() {
            for &(i, w) in nbrs {
                if i >= j {
                    builder.insert(j, i, w);
                }
            }
        }
        builder.build(DirectedMode::Undirected)
    }
}

/// Accumulates labelled, possibly duplicated, edges and freezes them into a [`Graph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    weights: HashMap<(NodeId, NodeId), f64>,
    order: Vec<(NodeId, NodeId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `label`, registering it if unseen.
    pub fn add_node(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    /// Adds `weight` to the edge `src -> dst`; duplicates accumulate.
    pub fn add_edge(&mut self, src: NodeId, dst: NodeId, weight: f64) -> Result<()> {
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidWeight { line: 0, weight });
        }
        self.insert(src, dst, weight);
        Ok(())
    }

    fn insert(&mut self, src: NodeId, dst: NodeId, weight: f64) {
        let n = src.max(dst) + 1;
        while self.labels.len() < n {
            let label = (self.labels.len() + 1).to_string();
            self.add_node(&label);
        }
        let slot = self.weights.entry((src, dst)).or_insert_with(|| {
            self.order.push((src, dst));
            0.0
        });
        *slot += weight;
    }

    pub fn build(self, mode: DirectedMode) -> Graph {
        let directed = match mode {
            DirectedMode::Directed => true,
            DirectedMode::Undirected => false,
            DirectedMode::Auto => self.order.iter().any(|&(u, v)| {
                u != v
                    && self
                        .weights
                        .get(&(v, u))
                        .is_some_and(|&back| back != self.weights[&(u, v)])
            }),
        };

        let mut edges = Vec::with_capacity(self.order.len());
        if directed {
            for &(u, v) in &self.order {
                edges.push(Edge {
                    src: u,
                    dst: v,
                    weight: self.weights[&(u, v)],
                });
            }
        } else {
            let mut emitted = HashMap::new();
            for &(u, v) in &self.order {
                let key = (u.min(v), u.max(v));
                if emitted.insert(key, ()).is_some() {
                    continue;
                }
                let forward = self.weights[&(u, v)];
                let weight = match self.weights.get(&(v, u)) {
                    Some(&back) if u != v => (forward + back) / 2.0,
                    _ => forward,
                };
                edges.push(Edge {
                    src: u,
                    dst: v,
                    weight,
                });
            }
        }
        assemble(self.labels, directed, edges)
    }
}

fn assemble(labels: Vec<String>, directed: bool, edges: Vec<Edge>) -> Graph {
    let n = labels.len();
    let mut sym_maps: Vec<BTreeMap<NodeId, f64>> = vec![BTreeMap::new(); n];
    let mut in_adj = vec![Vec::new(); n];
    let mut out_adj = vec![Vec::new(); n];
    for e in &edges {
        if directed {
            out_adj[e.src].push((e.dst, e.weight));
            in_adj[e.dst].push((e.src, e.weight));
            *sym_maps[e.src].entry(e.dst).or_insert(0.0) += e.weight / 2.0;
            *sym_maps[e.dst].entry(e.src).or_insert(0.0) += e.weight / 2.0;
        } else {
            out_adj[e.src].push((e.dst, e.weight));
            in_adj[e.dst].push((e.src, e.weight));
            if e.src == e.dst {
                sym_maps[e.src].insert(e.src, e.weight);
            } else {
                out_adj[e.dst].push((e.src, e.weight));
                in_adj[e.src].push((e.dst, e.weight));
                sym_maps[e.src].insert(e.dst, e.weight);
                sym_maps[e.dst].insert(e.src, e.weight);
            }
        }
    }
    for list in in_adj.iter_mut().chain(out_adj.iter_mut()) {
        list.sort_by_key(|&(k, _)| k);
    }
    let sym = sym_maps
        .into_iter()
        .map(|m| m.into_iter().collect::<Vec<_>>())
        .collect();

    let mut pair_index: HashMap<(NodeId, NodeId), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut pair_adj = vec![Vec::new(); n];
    let pair_of_edge = edges
        .iter()
        .map(|e| {
            if e.src == e.dst {
                return None;
            }
            let key = (e.src.min(e.dst), e.src.max(e.dst));
            Some(*pair_index.entry(key).or_insert_with(|| {
                let id = pairs.len();
                pairs.push(key);
                pair_adj[key.0].push((key.1, id));
                pair_adj[key.1].push((key.0, id));
                id
            }))
        })
        .collect();
    for list in &mut pair_adj {
        list.sort_unstable();
    }

    Graph {
        labels,
        directed,
        edges,
        sym,
        in_adj,
        out_adj,
        pairs,
        pair_of_edge,
        pair_adj,
    }
}

/// Parses a whitespace-separated `src dst [weight]` edge list.
pub fn load_graph(source: &str, mode: DirectedMode) -> Result<Graph> {
    let mut builder = GraphBuilder::new();
    for (idx, raw) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected `src dst [weight]`, found {} fields", fields.len()),
            });
        }
        let weight = match fields.get(2) {
            Some(text) => text.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid weight `{text}`"),
            })?,
            None => 1.0,
        };
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidWeight {
                line: line_no,
                weight,
            });
        }
        let src = builder.add_node(fields[0]);
        let dst = builder.add_node(fields[1]);
        builder.insert(src, dst, weight);
    }
    if builder.labels.is_empty() {
        return Err(Error::NoNodes);
    }
    Ok(builder.build(mode))
}

pub fn load_graph_file(path: impl AsRef<Path>, mode: DirectedMode) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    load_graph(&text, mode)
}

/// Weighted degrees of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeTable {
    /// Symmetrized total degree `dT(j) = sum_i (a_ij + a_ji) / 2`.
    pub total: Vec<f64>,
    pub in_degree: Vec<f64>,
    pub out_degree: Vec<f64>,
    pub min_total: f64,
    pub max_total: f64,
}

pub fn degree_table(g: &Graph) -> DegreeTable {
    let n = g.node_count();
    let mut total = Vec::with_capacity(n);
    let mut in_degree = Vec::with_capacity(n);
    let mut out_degree = Vec::with_capacity(n);
    let mut min_total = f64::INFINITY;
    let mut max_total = 0.0_f64;
    for j in 0..n {
        let dt: f64 = g.sym[j].iter().map(|&(_, w)| w).sum();
        min_total = min_total.min(dt);
        max_total = max_total.max(dt);
        total.push(dt);
        in_degree.push(g.in_adj[j].iter().map(|&(_, w)| w).sum());
        out_degree.push(g.out_adj[j].iter().map(|&(_, w)| w).sum());
    }
    DegreeTable {
        total,
        in_degree,
        out_degree,
        min_total,
        max_total,
    }
}

/// Global degree ratio `min dT / max dT`.
pub fn q_factor(dt: &DegreeTable) -> Result<f64> {
    if dt.max_total <= 0.0 {
        return Err(Error::DegenerateGraph);
    }
    Ok(dt.min_total / dt.max_total)
}
