//! Shortest-path edge betweenness on the undirected skeleton (hop counts).

use std::collections::VecDeque;

use crate::graph::Graph;

/// Betweenness per skeleton pair id.
#[derive(Debug, Clone, PartialEq)]
pub struct BetweennessTable {
    pub values: Vec<f64>,
}

impl BetweennessTable {
    pub fn pair(&self, pair: usize) -> f64 {
        self.values[pair]
    }

    /// Betweenness of graph edge `edge`; 0 for self-loops.
    pub fn edge(&self, g: &Graph, edge: usize) -> f64 {
        g.pair_of_edge(edge).map_or(0.0, |p| self.values[p])
    }
}

/// Sum over unordered node pairs of the fraction of shortest paths through
/// each edge, accumulated from every source (Brandes).
pub fn edge_betweenness(g: &Graph) -> BetweennessTable {
    let n = g.node_count();
    let mut values = vec![0.0; g.pairs().len()];

    let mut sigma = vec![0.0_f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0_f64; n];
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for source in 0..n {
        for v in order.drain(..) {
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
            preds[v].clear();
        }
        sigma[source] = 1.0;
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(w, pair) in g.pair_neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push((v, pair));
                }
            }
        }
        for &w in order.iter().rev() {
            for &(v, pair) in &preds[w] {
                let share = sigma[v] / sigma[w] * (1.0 + delta[w]);
                values[pair] += share;
                delta[v] += share;
            }
        }
    }
    // every unordered pair was counted from both ends
    for v in &mut values {
        *v /= 2.0;
    }
    BetweennessTable { values }
}
