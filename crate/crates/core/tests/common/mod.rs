//! Brute-force oracles and random instance generators shared by the
//! integration tests. Nothing here calls into the library's algorithms.

#![allow(dead_code)]

use multistep::{DirectedMode, Graph, GraphBuilder, Partition};
use rand::Rng;

/// Dense symmetrized weights `s_ij`, self-loops on the diagonal.
pub fn dense_sym(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut s = vec![vec![0.0; n]; n];
    for e in g.edges() {
        if e.src == e.dst {
            s[e.src][e.src] += e.weight;
        } else if g.is_directed() {
            s[e.src][e.dst] += e.weight / 2.0;
            s[e.dst][e.src] += e.weight / 2.0;
        } else {
            s[e.src][e.dst] += e.weight;
            s[e.dst][e.src] += e.weight;
        }
    }
    s
}

/// `(1/W) sum_ij [s_ij - d_i d_j / W] delta(c_i, c_j)`.
pub fn dense_modularity(s: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = s.len();
    let d: Vec<f64> = s.iter().map(|row| row.iter().sum()).collect();
    let w: f64 = d.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += s[i][j] - d[i] * d[j] / w;
            }
        }
    }
    q / w
}

/// Every set partition of `0..n` as a restricted growth string.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for c in 0..=next {
            prefix.push(c);
            grow(prefix, n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::with_capacity(n), n, &mut out);
    out
}

/// Maximum modularity over all partitions of the node set.
pub fn exhaustive_max_modularity(g: &Graph) -> f64 {
    let s = dense_sym(g);
    all_partitions(g.node_count())
        .iter()
        .map(|labels| dense_modularity(&s, labels))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Smallest number of removed elements after which `p` and `q` group the
/// survivors identically, by trying every surviving subset.
pub fn brute_force_deletions(p: &[usize], q: &[usize]) -> usize {
    let n = p.len();
    assert!(n <= 16);
    let mut best = 0;
    for mask in 0u32..(1 << n) {
        let kept: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if kept.len() <= best {
            continue;
        }
        let agree = kept
            .iter()
            .all(|&i| kept.iter().all(|&j| (p[i] == p[j]) == (q[i] == q[j])));
        if agree {
            best = kept.len();
        }
    }
    n - best
}

/// Edge betweenness per skeleton pair by listing every simple path between
/// every unordered node pair and keeping the shortest ones.
pub fn brute_force_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut adj = vec![vec![None; n]; n];
    for (id, &(u, v)) in g.pairs().iter().enumerate() {
        adj[u][v] = Some(id);
        adj[v][u] = Some(id);
    }
    fn walk(
        adj: &[Vec<Option<usize>>],
        at: usize,
        target: usize,
        seen: &mut Vec<bool>,
        path: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
    ) {
        if at == target {
            found.push(path.clone());
            return;
        }
        for next in 0..adj.len() {
            if let (Some(pair), false) = (adj[at][next], seen[next]) {
                seen[next] = true;
                path.push(pair);
                walk(adj, next, target, seen, path, found);
                path.pop();
                seen[next] = false;
            }
        }
    }
    let mut values = vec![0.0; g.pairs().len()];
    for s in 0..n {
        for t in s + 1..n {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut found = Vec::new();
            walk(&adj, s, t, &mut seen, &mut Vec::new(), &mut found);
            let Some(shortest) = found.iter().map(Vec::len).min() else {
                continue;
            };
            let paths: Vec<&Vec<usize>> = found.iter().filter(|p| p.len() == shortest).collect();
            let mut uses = vec![0u64; values.len()];
            for path in &paths {
                for &pair in path.iter() {
                    uses[pair] += 1;
                }
            }
            for (v, &k) in values.iter_mut().zip(&uses) {
                *v += k as f64 / paths.len() as f64;
            }
        }
    }
    values
}

/// Nodes labelled `0..n`.
pub fn builder_with_nodes(n: usize) -> GraphBuilder {
    let mut b = GraphBuilder::new();
    for v in 0..n {
        b.add_node(&v.to_string());
    }
    b
}

/// Random undirected graph on `n` nodes: a random spanning tree when
/// `connected`, plus each other pair with probability `p`; weights are 1 or
/// drawn from `[0.5, 3)`, with occasional self-loops when weighted.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, connected: bool, weighted: bool) -> Graph {
    let mut b = builder_with_nodes(n);
    let mut present = vec![vec![false; n]; n];
    let weight = |rng: &mut R| if weighted { rng.random_range(0.5..3.0) } else { 1.0 };
    if connected {
        for v in 1..n {
            let u = rng.random_range(0..v);
            present[u][v] = true;
            b.add_edge(u, v, weight(rng)).unwrap();
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present[u][v] && rng.random_bool(p) {
                b.add_edge(u, v, weight(rng)).unwrap();
            }
        }
        if weighted && rng.random_bool(0.05) {
            b.add_edge(u, u, weight(rng)).unwrap();
        }
    }
    b.build(DirectedMode::Undirected)
}

/// Random partition of `n` elements into at most `k` blocks.
pub fn random_partition<R: Rng>(rng: &mut R, n: usize, k: usize) -> Partition {
    Partition::from_labels((0..n).map(|_| rng.random_range(0..k)))
}

/// Edge betweenness from all-pairs hop distances and path counts: a pair
/// `(u, v)` carries `sigma(s,u) sigma(v,t) / sigma(s,t)` of the `s -> t`
/// traffic whenever `d(s,u) + 1 + d(v,t) = d(s,t)`.
pub fn counting_betweenness(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in g.pairs() {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut dist = vec![vec![usize::MAX; n]; n];
    let mut sigma = vec![vec![0.0_f64; n]; n];
    for s in 0..n {
        dist[s][s] = 0;
        sigma[s][s] = 1.0;
        let mut frontier = vec![s];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &u in &frontier {
                for &v in &adj[u] {
                    if dist[s][v] == usize::MAX {
                        dist[s][v] = dist[s][u] + 1;
                        next.push(v);
                    }
                    if dist[s][v] == dist[s][u] + 1 {
                        sigma[s][v] += sigma[s][u];
                    }
                }
            }
            frontier = next;
        }
    }
    let mut values = vec![0.0; g.pairs().len()];
    for (id, &(a, b)) in g.pairs().iter().enumerate() {
        for s in 0..n {
            for t in s + 1..n {
                if dist[s][t] == usize::MAX {
                    continue;
                }
                for (u, v) in [(a, b), (b, a)] {
                    if dist[s][u] != usize::MAX
                        && dist[v][t] != usize::MAX
                        && dist[s][u] + 1 + dist[v][t] == dist[s][t]
                    {
                        values[id] += sigma[s][u] * sigma[v][t] / sigma[s][t];
                    }
                }
            }
        }
    }
    values
}
