//! Girvan-Newman style refinement restricted to critical nodes.
//!
//! Edge betweenness is computed once on the intact skeleton and the critical
//! edges (those touching a critical node) are removed in descending
//! betweenness order, ties by ascending pair id. A critical node is resolved
//! the moment it is left with a single edge:
//!
//! 1. if the remaining neighbour is non-critical, the node copies its community;
//! 2. otherwise the node is queued as a follower of that neighbour.
//!
//! Removing an edge between a critical node and a non-critical one records the
//! latter as the critical node's header, with a priority that grows with every
//! removal. Once all critical edges are gone, queued nodes are settled by
//! (a) founding a new community for each connected group of queued nodes and
//! their recorded neighbours larger than `min_new_community`, (b) copying an
//! already solved neighbour, and (c) taking the header of highest priority
//! and cascading the result down follower chains.
//!
//! Non-critical nodes never change community.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::{self, Write as _};
use std::io::Write;

use crate::betweenness::edge_betweenness;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::heuristics::CriticalSet;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceEvent {
    Remove,
    Header,
    Assign,
    Queue,
    NewCommunity,
    FromNeighbour,
    FromHeader,
    FromLeader,
    Keep,
}

impl TraceEvent {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceEvent::Remove => "remove",
            TraceEvent::Header => "header",
            TraceEvent::Assign => "assign",
            TraceEvent::Queue => "queue",
            TraceEvent::NewCommunity => "new-community",
            TraceEvent::FromNeighbour => "from-neighbour",
            TraceEvent::FromHeader => "from-header",
            TraceEvent::FromLeader => "from-leader",
            TraceEvent::Keep => "keep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Edge(usize),
    Node(NodeId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub step: usize,
    pub event: TraceEvent,
    pub subject: Subject,
    pub detail: String,
}

/// Bookkeeping of a refinement run.
#[derive(Debug, Clone)]
pub struct RefinementState {
    pub critical: Vec<bool>,
    /// Critical pair ids in removal order.
    pub critical_edges: Vec<usize>,
    pub header: Vec<Option<NodeId>>,
    pub priority: Vec<Option<u64>>,
    /// Neighbour a node was left attached to when it got resolved.
    pub anchor: Vec<Option<NodeId>>,
    pub followers: Vec<Vec<NodeId>>,
    pub queued: BTreeSet<NodeId>,
    pub solved: BTreeSet<NodeId>,
    /// Working community vector; new communities get ids past the coarse ones.
    pub community: Vec<usize>,
    alive: Vec<bool>,
    degree: Vec<usize>,
    next_priority: u64,
    next_community: usize,
    step: usize,
    trace: Vec<TraceEntry>,
}

impl RefinementState {
    fn new(g: &Graph, coarse: &Partition, critical: &CriticalSet) -> Self {
        let n = g.node_count();
        RefinementState {
            critical: critical.mask(n),
            critical_edges: Vec::new(),
            header: vec![None; n],
            priority: vec![None; n],
            anchor: vec![None; n],
            followers: vec![Vec::new(); n],
            queued: BTreeSet::new(),
            solved: BTreeSet::new(),
            community: coarse.assignment().to_vec(),
            alive: vec![true; g.pairs().len()],
            degree: (0..n).map(|v| g.pair_neighbors(v).len()).collect(),
            next_priority: 0,
            next_community: coarse.community_count(),
            step: 0,
            trace: Vec::new(),
        }
    }

    fn log(&mut self, event: TraceEvent, subject: Subject, detail: impl Into<String>) {
        self.trace.push(TraceEntry {
            step: self.step,
            event,
            subject,
            detail: detail.into(),
        });
    }

    fn is_pending(&self, v: NodeId) -> bool {
        self.critical[v] && !self.queued.contains(&v) && !self.solved.contains(&v)
    }

    fn sole_neighbor(&self, g: &Graph, v: NodeId) -> Option<NodeId> {
        let mut alive = g
            .pair_neighbors(v)
            .iter()
            .filter(|&&(_, pair)| self.alive[pair]);
        match (alive.next(), alive.next()) {
            (Some(&(u, _)), None) => Some(u),
            _ => None,
        }
    }

    fn solve(&mut self, v: NodeId, community: usize, event: TraceEvent, detail: String) {
        self.community[v] = community;
        self.queued.remove(&v);
        self.solved.insert(v);
        self.log(event, Subject::Node(v), detail);
    }

    /// Rules for a critical node left with exactly one edge.
    fn resolve_if_single(&mut self, g: &Graph, v: NodeId) {
        if !self.is_pending(v) || self.degree[v] != 1 {
            return;
        }
        let Some(u) = self.sole_neighbor(g, v) else {
            return;
        };
        self.anchor[v] = Some(u);
        if self.critical[u] {
            self.queued.insert(v);
            self.followers[u].push(v);
            self.log(TraceEvent::Queue, Subject::Node(v), format!("follows {}", g.label(u)));
        } else {
            let c = self.community[u];
            self.solve(v, c, TraceEvent::Assign, format!("joins {} ({})", g.label(u), c));
        }
    }

    /// Settles queued followers of `leader` (and theirs, transitively).
    fn cascade(&mut self, g: &Graph, leader: NodeId) {
        let mut stack = vec![leader];
        while let Some(v) = stack.pop() {
            let followers = self.followers[v].clone();
            for f in followers {
                if self.queued.contains(&f) {
                    let c = self.community[v];
                    self.solve(f, c, TraceEvent::FromLeader, format!("follows {}", g.label(v)));
                    stack.push(f);
                }
            }
        }
    }

    /// Verifies the bookkeeping invariants.
    pub fn check(&self) -> Result<()> {
        if let Some(v) = self.queued.intersection(&self.solved).next() {
            return Err(self.inconsistent(format!("node {v} is both queued and solved")));
        }
        if let Some(v) = self.solved.iter().find(|&&v| !self.critical[v]) {
            return Err(self.inconsistent(format!("non-critical node {v} was reassigned")));
        }
        let mut seen = BTreeSet::new();
        if let Some(p) = self.priority.iter().flatten().find(|&&p| !seen.insert(p)) {
            return Err(self.inconsistent(format!("priority {p} assigned twice")));
        }
        Ok(())
    }

    fn inconsistent(&self, reason: String) -> Error {
        Error::InconsistentRefinement {
            reason,
            dump: self.to_string(),
        }
    }
}

impl fmt::Display for RefinementState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "critical: {:?}", (0..self.critical.len()).filter(|&v| self.critical[v]).collect::<Vec<_>>())?;
        writeln!(f, "queued: {:?}", self.queued)?;
        writeln!(f, "solved: {:?}", self.solved)?;
        writeln!(f, "header: {:?}", self.header)?;
        writeln!(f, "priority: {:?}", self.priority)?;
        writeln!(f, "anchor: {:?}", self.anchor)?;
        write!(f, "community: {:?}", self.community)
    }
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub partition: Partition,
    pub state: RefinementState,
}

impl Refinement {
    pub fn trace(&self) -> &[TraceEntry] {
        &self.state.trace
    }
}

pub fn refine(
    g: &Graph,
    coarse: &Partition,
    critical: &CriticalSet,
    min_new_community: usize,
) -> Result<Partition> {
    refine_traced(g, coarse, critical, min_new_community).map(|r| r.partition)
}

pub fn refine_traced(
    g: &Graph,
    coarse: &Partition,
    critical: &CriticalSet,
    min_new_community: usize,
) -> Result<Refinement> {
    coarse.check_covers(g)?;
    let mut st = RefinementState::new(g, coarse, critical);
    if critical.is_empty() {
        return Ok(Refinement {
            partition: coarse.clone(),
            state: st,
        });
    }

    let betweenness = edge_betweenness(g);
    let mut order = critical.edges.clone();
    order.sort_by(|&a, &b| {
        betweenness.values[b]
            .total_cmp(&betweenness.values[a])
            .then(a.cmp(&b))
    });
    st.critical_edges = order.clone();

    for &v in &critical.nodes {
        st.resolve_if_single(g, v);
    }

    for pair in order {
        st.step += 1;
        let (u, v) = g.pairs()[pair];
        st.alive[pair] = false;
        st.degree[u] -= 1;
        st.degree[v] -= 1;
        let detail = format!("betweenness {}", betweenness.values[pair]);
        st.log(TraceEvent::Remove, Subject::Edge(pair), detail);

        for (c, other) in [(u, v), (v, u)] {
            if st.critical[c] && !st.critical[other] {
                st.header[c] = Some(other);
                st.priority[c] = Some(st.next_priority);
                st.next_priority += 1;
                st.log(TraceEvent::Header, Subject::Node(c), g.label(other).to_owned());
            }
        }
        for x in [u.min(v), u.max(v)] {
            st.resolve_if_single(g, x);
        }
    }
    st.step += 1;

    // new communities from connected groups of queued nodes and their anchors
    let listed: BTreeSet<NodeId> = st
        .queued
        .iter()
        .flat_map(|&q| std::iter::once(q).chain(st.anchor[q]))
        .collect();
    let mut seen = BTreeSet::new();
    for &start in &listed {
        if !seen.insert(start) {
            continue;
        }
        let mut component = vec![start];
        let mut frontier = VecDeque::from([start]);
        while let Some(x) = frontier.pop_front() {
            for &(y, _) in g.pair_neighbors(x) {
                if listed.contains(&y) && seen.insert(y) {
                    component.push(y);
                    frontier.push_back(y);
                }
            }
        }
        if component.len() > min_new_community {
            let label = st.next_community;
            st.next_community += 1;
            component.sort_unstable();
            for v in component {
                if st.queued.contains(&v) {
                    st.solve(v, label, TraceEvent::NewCommunity, format!("community {label}"));
                }
            }
        }
    }

    // queued nodes whose recorded neighbour is already solved
    loop {
        let ready: Vec<(NodeId, NodeId)> = st
            .queued
            .iter()
            .filter_map(|&q| st.anchor[q].filter(|a| st.solved.contains(a)).map(|a| (q, a)))
            .collect();
        if ready.is_empty() {
            break;
        }
        for (q, a) in ready {
            if st.queued.contains(&q) {
                let c = st.community[a];
                st.solve(q, c, TraceEvent::FromNeighbour, format!("joins {} ({c})", g.label(a)));
            }
        }
    }

    // header of highest priority first, then its follower chain
    while !st.queued.is_empty() {
        let next = st
            .queued
            .iter()
            .filter_map(|&q| st.priority[q].map(|p| (p, q)))
            .max();
        let Some((_, q)) = next else {
            break;
        };
        let h = st.header[q].ok_or_else(|| st.inconsistent(format!("node {q} has a priority but no header")))?;
        let c = st.community[h];
        st.solve(q, c, TraceEvent::FromHeader, format!("header {} ({c})", g.label(h)));
        st.cascade(g, q);
    }

    // groups with neither header nor solved neighbour keep the coarse labels
    for q in std::mem::take(&mut st.queued) {
        let c = coarse.community_of(q);
        st.solve(q, c, TraceEvent::Keep, format!("coarse ({c})"));
    }

    if let Some(v) = (0..g.node_count()).find(|&v| st.is_pending(v) && st.degree[v] > 0) {
        return Err(st.inconsistent(format!("critical node {v} still has live edges")));
    }
    st.check()?;
    Ok(Refinement {
        partition: Partition::from_labels(st.community.iter().copied()),
        state: st,
    })
}

/// Writes the trace as `step,event,subject,detail`; edges print as `u-v` labels.
pub fn write_trace<W: Write>(g: &Graph, trace: &[TraceEntry], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "event", "subject", "detail"])?;
    for e in trace {
        let mut subject = String::new();
        match e.subject {
            Subject::Edge(p) => {
                let (u, v) = g.pairs()[p];
                let _ = write!(subject, "{}-{}", g.label(u), g.label(v));
            }
            Subject::Node(v) => subject.push_str(g.label(v)),
        }
        w.write_record([e.step.to_string().as_str(), e.event.as_str(), &subject, &e.detail])?;
    }
    w.flush()?;
    Ok(())
}
