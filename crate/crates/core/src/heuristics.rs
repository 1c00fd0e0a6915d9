//! Per-node criticality scores computed against a coarse partition.
//!
//! First order: `H1(j) = 1/(2 dT(j)) sum_i (a_ij + a_ji) com(i,j)`, the signed
//! share of a node's weight that stays inside its community.
//!
//! Second order: `H2(j) = 1/(2 dT(j)^2) sum_{i != j} (a_ij + a_ji) com(i,j) Q dT(i) H1(i)`
//! with the global degree ratio `Q = min dT / max dT`. Neighbours that are
//! themselves firmly placed pull `j` towards (or away from) their community,
//! scaled by their relative degree `Q dT(i) / dT(j)`.
//!
//! Combined: `H = alpha H1 + (2 - alpha) H2`, `alpha` in `[0, 2]`. Negative
//! values flag a probable misassignment.
//!
//! Directed graphs use in- and out-versions of both scores (weights `a_ij`
//! with in-degrees, `a_ji` with out-degrees) and combine their products.

use crate::error::{Error, Result};
use crate::graph::{degree_table, q_factor, DegreeTable, Graph, NodeId};
use crate::partition::{com, ComMode, Partition};

#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicScores {
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub h: Vec<f64>,
    pub alpha: f64,
    /// Nodes with zero total degree; all their scores are 0.
    pub isolated: Vec<bool>,
    /// Directed scoring only: nodes with no in-edges or no out-edges, scored
    /// on the informative side alone.
    pub one_sided: Vec<bool>,
    pub com_mode: ComMode,
}

impl HeuristicScores {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Node ids by ascending `H`, ties by ascending id.
    pub fn ranking(&self) -> Vec<NodeId> {
        let mut order: Vec<NodeId> = (0..self.h.len()).collect();
        order.sort_by(|&a, &b| self.h[a].total_cmp(&self.h[b]).then(a.cmp(&b)));
        order
    }
}

/// `sum_i w_ij com(i, j)` over `nbrs`, optionally skipping `i == j`.
#[inline]
fn signed_sum(
    p: &Partition,
    j: NodeId,
    nbrs: &[(NodeId, f64)],
    mode: ComMode,
    skip_self: bool,
    mut factor: impl FnMut(NodeId) -> f64,
) -> f64 {
    let mut acc = 0.0;
    for &(i, w) in nbrs {
        if skip_self && i == j {
            continue;
        }
        let c = com(p, i, j, mode);
        if c != 0 {
            acc += f64::from(c) * w * factor(i);
        }
    }
    acc
}

pub fn h1_scores(g: &Graph, dt: &DegreeTable, p: &Partition, mode: ComMode) -> Vec<f64> {
    (0..g.node_count())
        .map(|j| {
            let d = dt.total[j];
            if d == 0.0 {
                0.0
            } else {
                signed_sum(p, j, g.sym_neighbors(j), mode, false, |_| 1.0) / d
            }
        })
        .collect()
}

pub fn h2_scores(
    g: &Graph,
    dt: &DegreeTable,
    p: &Partition,
    h1: &[f64],
    q: f64,
    mode: ComMode,
) -> Vec<f64> {
    (0..g.node_count())
        .map(|j| {
            let d = dt.total[j];
            if d == 0.0 {
                0.0
            } else {
                let acc = signed_sum(p, j, g.sym_neighbors(j), mode, true, |i| dt.total[i] * h1[i]);
                // |H2| <= 1 holds exactly; rounding can overshoot where it is attained
                (q * acc / (d * d)).clamp(-1.0, 1.0)
            }
        })
        .collect()
}

/// `alpha h1 + (2 - alpha) h2`.
pub fn combined_h(h1: &[f64], h2: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(0.0..=2.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    Ok(h1
        .iter()
        .zip(h2)
        .map(|(&a, &b)| alpha * a + (2.0 - alpha) * b)
        .collect())
}

/// Undirected scores on symmetrized weights.
pub fn heuristic_scores(
    g: &Graph,
    p: &Partition,
    mode: ComMode,
    alpha: f64,
) -> Result<HeuristicScores> {
    p.check_covers(g)?;
    let dt = degree_table(g);
    let q = q_factor(&dt)?;
    let h1 = h1_scores(g, &dt, p, mode);
    let h2 = h2_scores(g, &dt, p, &h1, q, mode);
    let h = combined_h(&h1, &h2, alpha)?;
    Ok(HeuristicScores {
        h1,
        h2,
        h,
        alpha,
        isolated: dt.total.iter().map(|&d| d == 0.0).collect(),
        one_sided: vec![false; g.node_count()],
        com_mode: mode,
    })
}

struct Side {
    h1: Vec<f64>,
    h2: Vec<f64>,
}

fn directional_side<'g>(
    g: &'g Graph,
    p: &Partition,
    mode: ComMode,
    q: f64,
    degree: &[f64],
    nbrs: impl Fn(NodeId) -> &'g [(NodeId, f64)],
) -> Side {
    let n = g.node_count();
    // degree(i) * H1(i), kept unnormalized so zero-degree neighbours stay defined
    let raw: Vec<f64> = (0..n)
        .map(|j| signed_sum(p, j, nbrs(j), mode, false, |_| 1.0))
        .collect();
    let h1 = (0..n)
        .map(|j| if degree[j] == 0.0 { 0.0 } else { raw[j] / degree[j] })
        .collect();
    let h2 = (0..n)
        .map(|j| {
            let d = degree[j];
            if d == 0.0 {
                0.0
            } else {
                q * signed_sum(p, j, nbrs(j), mode, true, |i| raw[i]) / (d * d)
            }
        })
        .collect();
    Side { h1, h2 }
}

/// Directed scores: `H1' = H1_in H1_out`, `H2' = H2_in H2_out`, combined with
/// `alpha` as in the undirected case. A node lacking in- or out-edges keeps
/// only its informative side.
pub fn directed_h(
    g: &Graph,
    dt: &DegreeTable,
    p: &Partition,
    mode: ComMode,
    alpha: f64,
) -> Result<HeuristicScores> {
    p.check_covers(g)?;
    let q = q_factor(dt)?;
    let incoming = directional_side(g, p, mode, q, &dt.in_degree, |j| g.in_neighbors(j));
    let outgoing = directional_side(g, p, mode, q, &dt.out_degree, |j| g.out_neighbors(j));

    let n = g.node_count();
    let mut h1 = vec![0.0; n];
    let mut h2 = vec![0.0; n];
    let mut isolated = vec![false; n];
    let mut one_sided = vec![false; n];
    for j in 0..n {
        let has_in = dt.in_degree[j] > 0.0;
        let has_out = dt.out_degree[j] > 0.0;
        match (has_in, has_out) {
            (false, false) => isolated[j] = true,
            (true, true) => {
                h1[j] = incoming.h1[j] * outgoing.h1[j];
                h2[j] = incoming.h2[j] * outgoing.h2[j];
            }
            (true, false) => {
                one_sided[j] = true;
                h1[j] = incoming.h1[j];
                h2[j] = incoming.h2[j];
            }
            (false, true) => {
                one_sided[j] = true;
                h1[j] = outgoing.h1[j];
                h2[j] = outgoing.h2[j];
            }
        }
    }
    let h = combined_h(&h1, &h2, alpha)?;
    Ok(HeuristicScores {
        h1,
        h2,
        h,
        alpha,
        isolated,
        one_sided,
        com_mode: mode,
    })
}

/// Critical nodes and the skeleton edges (pair ids) touching them.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSet {
    /// Ascending node ids.
    pub nodes: Vec<NodeId>,
    pub threshold: f64,
    /// Ascending skeleton pair ids with at least one critical endpoint.
    pub edges: Vec<usize>,
}

impl CriticalSet {
    pub fn empty() -> Self {
        CriticalSet {
            nodes: Vec::new(),
            threshold: 0.0,
            edges: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.nodes {
            mask[v] = true;
        }
        mask
    }

    fn from_nodes(g: &Graph, nodes: Vec<NodeId>, threshold: f64) -> Self {
        let mask = {
            let mut m = vec![false; g.node_count()];
            nodes.iter().for_each(|&v| m[v] = true);
            m
        };
        let edges = g
            .pairs()
            .iter()
            .enumerate()
            .filter(|(_, &(u, v))| mask[u] || mask[v])
            .map(|(id, _)| id)
            .collect();
        CriticalSet {
            nodes,
            threshold,
            edges,
        }
    }
}

/// Nodes with `H < threshold`, isolated nodes excluded.
pub fn select_critical(g: &Graph, scores: &HeuristicScores, threshold: f64) -> CriticalSet {
    let nodes = (0..scores.len())
        .filter(|&j| !scores.isolated[j] && scores.h[j] < threshold)
        .collect();
    CriticalSet::from_nodes(g, nodes, threshold)
}

/// The `ceil(fraction * n)` lowest-scoring non-isolated nodes. The reported
/// threshold is the score of the first node left out (`+inf` if none).
pub fn select_critical_fraction(
    g: &Graph,
    scores: &HeuristicScores,
    fraction: f64,
) -> Result<CriticalSet> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::FractionOutOfRange(fraction));
    }
    let ranked: Vec<NodeId> = scores
        .ranking()
        .into_iter()
        .filter(|&j| !scores.isolated[j])
        .collect();
    let take = ((fraction * ranked.len() as f64).ceil() as usize).min(ranked.len());
    let threshold = ranked.get(take).map_or(f64::INFINITY, |&j| scores.h[j]);
    let mut nodes = ranked[..take].to_vec();
    nodes.sort_unstable();
    Ok(CriticalSet::from_nodes(g, nodes, threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_graph, DirectedMode};

    fn graph(text: &str) -> Graph {
        load_graph(text, DirectedMode::Auto).unwrap()
    }

    /// Direct transcription of the formulas over a dense adjacency matrix.
    fn dense_oracle(g: &Graph, p: &Partition) -> (Vec<f64>, Vec<f64>) {
        let n = g.node_count();
        let a = |i: usize, j: usize| g.weight(i, j);
        let dt: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| (a(i, j) + a(j, i)) / 2.0).sum())
            .collect();
        let max = dt.iter().cloned().fold(0.0, f64::max);
        let min = dt.iter().cloned().fold(f64::INFINITY, f64::min);
        let q = min / max;
        let c = |i: usize, j: usize| f64::from(com(p, i, j, ComMode::Full));
        let h1: Vec<f64> = (0..n)
            .map(|j| {
                let s: f64 = (0..n).map(|i| (a(i, j) + a(j, i)) * c(i, j)).sum();
                s / (2.0 * dt[j])
            })
            .collect();
        let h2 = (0..n)
            .map(|j| {
                let s: f64 = (0..n)
                    .filter(|&i| i != j)
                    .map(|i| (a(i, j) + a(j, i)) * c(i, j) * q * dt[i] * h1[i])
                    .sum();
                s / (2.0 * dt[j] * dt[j])
            })
            .collect();
        (h1, h2)
    }

    #[test]
    fn triangle_with_mislabeled_pendant() {
        let g = graph("1 2\n2 3\n3 1\n3 4");
        let p = Partition::from_labels(["A", "A", "A", "B"]);
        let s = heuristic_scores(&g, &p, ComMode::Full, 1.0).unwrap();
        assert_eq!(s.h1, vec![1.0, 1.0, 1.0 / 3.0, -1.0]);
        assert!((s.h2[2] - 5.0 / 27.0).abs() < 1e-15);
        assert!((s.h2[3] + 1.0 / 3.0).abs() < 1e-15);
        assert!((s.h2[0] - 0.25).abs() < 1e-15);
        assert_eq!(s.ranking()[0], 3);
        let crit = select_critical(&g, &s, 0.0);
        assert_eq!(crit.nodes, vec![3]);
        assert_eq!(crit.edges, vec![3]);
    }

    #[test]
    fn triangle_with_correct_pendant_matches_oracle() {
        let g = graph("1 2\n2 3\n3 1\n3 4");
        let p = Partition::single(4);
        let s = heuristic_scores(&g, &p, ComMode::Full, 1.0).unwrap();
        assert!((s.h2[2] - 5.0 / 27.0).abs() < 1e-15);
        let (h1, h2) = dense_oracle(&g, &p);
        for j in 0..4 {
            assert!((s.h1[j] - h1[j]).abs() < 1e-12);
            assert!((s.h2[j] - h2[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn weighted_graph_with_loop_matches_oracle() {
        let g = graph("1 2 2\n2 3 0.5\n3 1\n3 4 3\n4 5\n5 5 2\n5 6 1.5\n6 4\n2 6 0.25");
        let p = Partition::from_labels([0, 0, 1, 1, 1, 0]);
        let s = heuristic_scores(&g, &p, ComMode::Full, 1.0).unwrap();
        let (h1, h2) = dense_oracle(&g, &p);
        for j in 0..g.node_count() {
            assert!((s.h1[j] - h1[j]).abs() < 1e-12);
            assert!((s.h2[j] - h2[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn disjoint_cliques_score_one() {
        let g = graph("1 2\n2 3\n3 1\n4 5\n5 6\n6 4");
        let p = Partition::from_labels([0, 0, 0, 1, 1, 1]);
        let s = heuristic_scores(&g, &p, ComMode::Full, 1.0).unwrap();
        assert!(s.h1.iter().all(|&v| v == 1.0));
        assert!(s.h2.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!(select_critical(&g, &s, 0.0).is_empty());
    }

    #[test]
    fn zero_first_order_neighbours_give_zero_second_order() {
        // centre 1 sees two pendants each split half-and-half... use a path
        // where the inner nodes have H1 = 0
        let g = graph("1 2\n2 3\n3 4");
        let p = Partition::from_labels([0, 0, 1, 1]);
        let s = heuristic_scores(&g, &p, ComMode::Full, 1.0).unwrap();
        assert_eq!(s.h1[1], 0.0);
        assert_eq!(s.h1[2], 0.0);
        assert_eq!(s.h2[0], 0.0);
        assert_eq!(s.h2[3], 0.0);
    }

    #[test]
    fn alpha_endpoints_and_range() {
        let h1 = [0.5, -0.25];
        let h2 = [0.125, 1.0];
        assert_eq!(combined_h(&h1, &h2, 2.0).unwrap(), vec![1.0, -0.5]);
        assert_eq!(combined_h(&h1, &h2, 0.0).unwrap(), vec![0.25, 2.0]);
        assert!(matches!(combined_h(&h1, &h2, 2.5), Err(Error::AlphaOutOfRange(_))));
        assert!(combined_h(&h1, &h2, -0.1).is_err());
    }

    #[test]
    fn isolated_nodes_are_flagged_not_critical() {
        let mut b = crate::graph::GraphBuilder::new();
        for l in ["a", "b", "c"] {
            b.add_node(l);
        }
        b.add_edge(0, 1, 1.0).unwrap();
        let g = b.build(DirectedMode::Undirected);
        let p = Partition::from_labels([0, 1, 2]);
        let s = heuristic_scores(&g, &p, ComMode::Full, 1.0).unwrap();
        assert_eq!(s.isolated, vec![false, false, true]);
        assert_eq!((s.h1[2], s.h2[2], s.h[2]), (0.0, 0.0, 0.0));
        let crit = select_critical(&g, &s, 0.5);
        assert_eq!(crit.nodes, vec![0, 1]);
    }

    #[test]
    fn com_mode_split_is_exact() {
        let g = graph("1 2 2\n2 3\n3 1\n3 4 3\n4 5\n5 6\n6 4\n2 6");
        let p = Partition::from_labels([0, 0, 1, 1, 1, 0]);
        let dt = degree_table(&g);
        let q = q_factor(&dt).unwrap();
        let full = h1_scores(&g, &dt, &p, ComMode::Full);
        let pos = h1_scores(&g, &dt, &p, ComMode::PositiveOnly);
        let neg = h1_scores(&g, &dt, &p, ComMode::NegativeOnly);
        for j in 0..6 {
            assert!((full[j] - pos[j] - neg[j]).abs() < 1e-12);
        }
        let f2 = h2_scores(&g, &dt, &p, &full, q, ComMode::Full);
        let p2 = h2_scores(&g, &dt, &p, &full, q, ComMode::PositiveOnly);
        let n2 = h2_scores(&g, &dt, &p, &full, q, ComMode::NegativeOnly);
        for j in 0..6 {
            assert!((f2[j] - p2[j] - n2[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn directed_all_internal_and_sign_product() {
        // 1 -> 2 -> 3 -> 1 inside A; 3 -> 4 leaves to B; 4 -> 5 -> 4 in B
        let g = load_graph("1 2\n2 3\n3 1\n3 4\n4 5\n5 4 2", DirectedMode::Directed).unwrap();
        let p = Partition::from_labels([0, 0, 0, 1, 1]);
        let dt = degree_table(&g);
        let s = directed_h(&g, &dt, &p, ComMode::Full, 1.0).unwrap();
        assert_eq!(s.h1[0], 1.0);
        assert_eq!(s.h1[1], 1.0);
        // node 3: in from 2 (internal), out to 1 (internal) and 4 (external)
        assert_eq!(s.h1[2], 1.0 * 0.0);
        // node 4: in from 3 (external) and 5 (internal, weight 2); out to 5
        assert!((s.h1[3] - (1.0 / 3.0) * 1.0).abs() < 1e-15);

        let g = load_graph("1 2\n2 1\n2 3", DirectedMode::Directed).unwrap();
        let p = Partition::from_labels([0, 0, 1]);
        let dt = degree_table(&g);
        let s = directed_h(&g, &dt, &p, ComMode::Full, 1.0).unwrap();
        // node 2: in only from 1 (internal), out to 1 (internal) and 3 (external)
        assert_eq!(s.h1[1], 0.0);
        // node 3 is a sink: scored on its in-side alone
        assert!(s.one_sided[2]);
        assert_eq!(s.h1[2], -1.0);
    }

    #[test]
    fn directed_in_internal_out_external_is_minus_one() {
        let g = load_graph("1 2\n2 1\n2 3\n3 4\n4 3", DirectedMode::Directed).unwrap();
        let p = Partition::from_labels([0, 0, 1, 1]);
        let dt = degree_table(&g);
        let s = directed_h(&g, &dt, &p, ComMode::Full, 1.0).unwrap();
        // node 1: in from 2 (internal), out to 2 (internal)
        assert_eq!(s.h1[0], 1.0);
        // node 3: in from 2 (external) and 4 (internal), out to 4 (internal)
        assert_eq!(s.h1[2], 0.0);
        let g = load_graph("1 2\n2 1\n1 3\n3 4\n4 5\n5 4", DirectedMode::Directed).unwrap();
        let p = Partition::from_labels([0, 0, 0, 1, 1]);
        let dt = degree_table(&g);
        let s = directed_h(&g, &dt, &p, ComMode::Full, 1.0).unwrap();
        // node 3: in from 1 (internal), out to 4 (external)
        assert_eq!(s.h1[2], -1.0);
        assert!(!s.one_sided[2]);
    }

    #[test]
    fn symmetric_directed_squares_undirected() {
        let text = "1 2\n2 1\n2 3\n3 2\n3 1\n1 3\n3 4 2\n4 3 2\n4 5\n5 4";
        let d = load_graph(text, DirectedMode::Directed).unwrap();
        let u = load_graph(text, DirectedMode::Undirected).unwrap();
        let p = Partition::from_labels([0, 0, 0, 1, 1]);
        let sd = directed_h(&d, &degree_table(&d), &p, ComMode::Full, 1.0).unwrap();
        let su = heuristic_scores(&u, &p, ComMode::Full, 1.0).unwrap();
        for j in 0..5 {
            assert!((sd.h1[j] - su.h1[j] * su.h1[j]).abs() < 1e-12);
            assert!((sd.h2[j] - su.h2[j] * su.h2[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn fraction_selection() {
        let g = graph("1 2\n2 3\n3 1\n3 4");
        let p = Partition::from_labels(["A", "A", "A", "B"]);
        let s = heuristic_scores(&g, &p, ComMode::Full, 1.0).unwrap();
        let crit = select_critical_fraction(&g, &s, 0.5).unwrap();
        assert_eq!(crit.len(), 2);
        assert!(crit.nodes.contains(&3));
        assert!(select_critical_fraction(&g, &s, 0.0).unwrap().is_empty());
        assert_eq!(select_critical_fraction(&g, &s, 1.0).unwrap().len(), 4);
        assert!(select_critical_fraction(&g, &s, 1.5).is_err());
    }
}
