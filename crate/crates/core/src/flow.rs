//! Max-flow / min-cut over support graphs, and the separation networks built on them.
//!
//! Capacities are fixed-point integers: an LP value `x` becomes `round(x · 10⁶)`.
//! Arcs marked infinite receive, at solve time, a capacity one larger than the sum of
//! all finite capacities, so any cut crossing one is detected by exact comparison.

use std::collections::VecDeque;

use thiserror::Error;

use crate::instance::VertexSet;
use crate::support::SupportGraph;

pub type Capacity = i64;

/// Fixed-point resolution for fractional capacities.
pub const CAPACITY_SCALE: f64 = 1e6;

pub fn scale_capacity(x: f64) -> Capacity {
    (x * CAPACITY_SCALE).round() as Capacity
}

pub fn unscale_capacity(c: Capacity) -> f64 {
    c as f64 / CAPACITY_SCALE
}

#[derive(Debug, Error, PartialEq)]
pub enum FlowError {
    #[error("terminal sides overlap")]
    OverlappingSides,
    #[error("terminal side is empty")]
    EmptySide,
    #[error("covering sets do not intersect")]
    DisjointCovers,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArcCapacity {
    Finite(Capacity),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlowArc {
    pub from: usize,
    pub to: usize,
    pub capacity: ArcCapacity,
}

/// Directed network; undirected edges are stored as two opposite arcs.
#[derive(Clone, Debug)]
pub struct FlowNetwork {
    real_count: usize,
    node_count: usize,
    arcs: Vec<FlowArc>,
    source: usize,
    sink: usize,
}

impl FlowNetwork {
    /// A network whose first `real_count` nodes are graph vertices.
    pub fn new(real_count: usize) -> Self {
        FlowNetwork {
            real_count,
            node_count: real_count,
            arcs: Vec::new(),
            source: 0,
            sink: 0,
        }
    }

    pub fn add_node(&mut self) -> usize {
        self.node_count += 1;
        self.node_count - 1
    }

    pub fn add_arc(&mut self, from: usize, to: usize, capacity: ArcCapacity) {
        assert!(from < self.node_count && to < self.node_count);
        if let ArcCapacity::Finite(c) = capacity {
            assert!(c >= 0, "negative capacity");
        }
        self.arcs.push(FlowArc { from, to, capacity });
    }

    pub fn add_edge(&mut self, u: usize, v: usize, capacity: ArcCapacity) {
        self.add_arc(u, v, capacity);
        self.add_arc(v, u, capacity);
    }

    pub fn set_terminals(&mut self, source: usize, sink: usize) {
        assert!(source != sink, "source equals sink");
        assert!(source < self.node_count && sink < self.node_count);
        self.source = source;
        self.sink = sink;
    }

    pub fn real_count(&self) -> usize {
        self.real_count
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn arcs(&self) -> &[FlowArc] {
        &self.arcs
    }

    /// Capacity used for infinite arcs.
    pub fn infinity(&self) -> Capacity {
        self.arcs
            .iter()
            .filter_map(|a| match a.capacity {
                ArcCapacity::Finite(c) => Some(c),
                ArcCapacity::Infinite => None,
            })
            .sum::<Capacity>()
            + 1
    }

    /// Capacity of the cut leaving `source_side` (indexed over all nodes).
    pub fn cut_capacity(&self, source_side: &[bool]) -> Capacity {
        let inf = self.infinity();
        self.arcs
            .iter()
            .filter(|a| source_side[a.from] && !source_side[a.to])
            .map(|a| match a.capacity {
                ArcCapacity::Finite(c) => c,
                ArcCapacity::Infinite => inf,
            })
            .sum()
    }

    /// Total finite capacity of all arcs (both directions of an edge counted).
    pub fn finite_capacity_total(&self) -> Capacity {
        self.infinity() - 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinCutResult {
    /// Cut capacity, equal to the maximum flow value.
    pub value: Capacity,
    /// Real vertices on the source side.
    pub source_side: VertexSet,
    /// Source-side membership over every node, artificial ones included.
    pub source_nodes: Vec<bool>,
    /// Set when every source/sink cut crosses an infinite arc.
    pub infinite: bool,
}

impl MinCutResult {
    pub fn is_finite(&self) -> bool {
        !self.infinite
    }

    pub fn weight(&self) -> f64 {
        unscale_capacity(self.value)
    }
}

/// Result of a push-relabel run: the flow on every arc plus the minimum cut.
#[derive(Clone, Debug)]
pub struct MaxFlow {
    pub flow_value: Capacity,
    pub arc_flows: Vec<Capacity>,
    pub cut: MinCutResult,
}

struct Residual {
    head: Vec<usize>,
    residual: Vec<Capacity>,
    adjacency: Vec<Vec<usize>>,
}

/// FIFO push-relabel with the gap heuristic and an initial global relabel.
pub fn push_relabel(net: &FlowNetwork) -> MaxFlow {
    let n = net.node_count;
    let (s, t) = (net.source, net.sink);
    assert!(s != t, "source equals sink");
    let inf = net.infinity();

    // Residual arcs come in pairs: 2a is arc a, 2a+1 its reverse.
    let mut res = Residual {
        head: Vec::with_capacity(net.arcs.len() * 2),
        residual: Vec::with_capacity(net.arcs.len() * 2),
        adjacency: vec![Vec::new(); n],
    };
    for arc in &net.arcs {
        let cap = match arc.capacity {
            ArcCapacity::Finite(c) => c,
            ArcCapacity::Infinite => inf,
        };
        let idx = res.head.len();
        res.head.push(arc.to);
        res.residual.push(cap);
        res.adjacency[arc.from].push(idx);
        res.head.push(arc.from);
        res.residual.push(0);
        res.adjacency[arc.to].push(idx + 1);
    }

    let mut height = vec![0usize; n];
    let mut excess = vec![0 as Capacity; n];
    let mut current = vec![0usize; n];
    let mut count = vec![0usize; 2 * n + 1];
    let mut queue = VecDeque::new();
    let mut queued = vec![false; n];

    // Exact distance labels to the sink; nodes that cannot reach it start at n.
    let mut dist = vec![usize::MAX; n];
    dist[t] = 0;
    let mut bfs = VecDeque::from([t]);
    while let Some(v) = bfs.pop_front() {
        for &a in &res.adjacency[v] {
            let u = res.head[a];
            if dist[u] == usize::MAX && res.residual[a ^ 1] > 0 {
                dist[u] = dist[v] + 1;
                bfs.push_back(u);
            }
        }
    }
    for v in 0..n {
        height[v] = if dist[v] == usize::MAX { n } else { dist[v].min(n) };
    }
    height[s] = n;
    for &h in &height {
        count[h] += 1;
    }

    for idx in 0..res.adjacency[s].len() {
        let a = res.adjacency[s][idx];
        let delta = res.residual[a];
        if delta > 0 {
            let v = res.head[a];
            res.residual[a] -= delta;
            res.residual[a ^ 1] += delta;
            excess[v] += delta;
            excess[s] -= delta;
            if v != t && v != s && !queued[v] {
                queued[v] = true;
                queue.push_back(v);
            }
        }
    }

    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        while excess[u] > 0 {
            if current[u] == res.adjacency[u].len() {
                // relabel
                let old = height[u];
                let mut min_h = usize::MAX;
                for &a in &res.adjacency[u] {
                    if res.residual[a] > 0 {
                        min_h = min_h.min(height[res.head[a]]);
                    }
                }
                let new_h = if min_h == usize::MAX { 2 * n } else { (min_h + 1).min(2 * n) };
                count[old] -= 1;
                height[u] = new_h;
                count[new_h] += 1;
                current[u] = 0;
                if count[old] == 0 && old < n {
                    for v in 0..n {
                        if v != s && height[v] > old && height[v] < n {
                            count[height[v]] -= 1;
                            height[v] = n + 1;
                            count[n + 1] += 1;
                            current[v] = 0;
                        }
                    }
                    if height[u] < n + 1 {
                        count[height[u]] -= 1;
                        height[u] = n + 1;
                        count[n + 1] += 1;
                    }
                }
                if height[u] >= 2 * n {
                    break;
                }
                continue;
            }
            let a = res.adjacency[u][current[u]];
            let v = res.head[a];
            if res.residual[a] > 0 && height[u] == height[v] + 1 {
                let delta = excess[u].min(res.residual[a]);
                res.residual[a] -= delta;
                res.residual[a ^ 1] += delta;
                excess[u] -= delta;
                excess[v] += delta;
                if v != s && v != t && !queued[v] {
                    queued[v] = true;
                    queue.push_back(v);
                }
            } else {
                current[u] += 1;
            }
        }
    }

    let arc_flows: Vec<Capacity> = (0..net.arcs.len()).map(|a| res.residual[2 * a + 1]).collect();

    let mut on_source = vec![false; n];
    on_source[s] = true;
    let mut stack = vec![s];
    while let Some(v) = stack.pop() {
        for &a in &res.adjacency[v] {
            let u = res.head[a];
            if !on_source[u] && res.residual[a] > 0 {
                on_source[u] = true;
                stack.push(u);
            }
        }
    }
    let value = net.cut_capacity(&on_source);
    let source_side = VertexSet::from_vertices(net.real_count, (0..net.real_count).filter(|&v| on_source[v]));
    MaxFlow {
        flow_value: excess[t],
        arc_flows,
        cut: MinCutResult {
            value,
            source_side,
            source_nodes: on_source,
            infinite: value >= inf,
        },
    }
}

/// Maximum flow value and the source-side minimum cut reachable from the source.
pub fn max_flow_min_cut(net: &FlowNetwork) -> MinCutResult {
    let result = push_relabel(net);
    debug_assert_eq!(result.flow_value, result.cut.value, "max-flow != min-cut");
    result.cut
}

fn add_support_edges(net: &mut FlowNetwork, gf: &SupportGraph, skip: impl Fn(usize, usize) -> bool) {
    for &(i, j, x) in gf.edges() {
        if skip(i, j) {
            continue;
        }
        let c = scale_capacity(x);
        if c > 0 {
            net.add_edge(i, j, ArcCapacity::Finite(c));
        }
    }
}

fn attach_terminal(net: &mut FlowNetwork, side: &[usize], is_source: bool) -> usize {
    if side.len() == 1 {
        return side[0];
    }
    let terminal = net.add_node();
    for &w in side {
        if is_source {
            net.add_arc(terminal, w, ArcCapacity::Infinite);
        } else {
            net.add_arc(w, terminal, ArcCapacity::Infinite);
        }
    }
    terminal
}

/// Network whose minimum cut is the lightest `δ(S)` with `side_a ⊆ S` and
/// `side_b ∩ S = ∅`. Singleton sides use the vertex itself as terminal.
pub fn build_cut_network(
    gf: &SupportGraph,
    side_a: &VertexSet,
    side_b: &VertexSet,
) -> Result<FlowNetwork, FlowError> {
    if side_a.is_empty() || side_b.is_empty() {
        return Err(FlowError::EmptySide);
    }
    if !side_a.is_disjoint(side_b) {
        return Err(FlowError::OverlappingSides);
    }
    let mut net = FlowNetwork::new(gf.n());
    add_support_edges(&mut net, gf, |_, _| false);
    let a: Vec<usize> = side_a.iter().collect();
    let b: Vec<usize> = side_b.iter().collect();
    let s = attach_terminal(&mut net, &a, true);
    let t = attach_terminal(&mut net, &b, false);
    net.set_terminals(s, t);
    Ok(net)
}

/// Augmented network for overlapping covering sets `cv` and `cu`.
///
/// Each shared vertex `w` gets a twin `w'` on the sink side joined by an edge that
/// carries the weight of `T_w`, the edges from `w` to vertices outside `cv`; those
/// edges are dropped from the graph.
pub fn augment_for_ci(gf: &SupportGraph, cv: &VertexSet, cu: &VertexSet) -> Result<FlowNetwork, FlowError> {
    let shared = cv.intersection(cu);
    if shared.is_empty() {
        return Err(FlowError::DisjointCovers);
    }
    let n = gf.n();
    let is_t_edge = |a: usize, b: usize| shared.contains(a) && !cv.contains(b);
    let mut transferred = vec![0 as Capacity; n];
    for &(i, j, x) in gf.edges() {
        let c = scale_capacity(x);
        if is_t_edge(i, j) {
            transferred[i] += c;
        }
        if is_t_edge(j, i) {
            transferred[j] += c;
        }
    }

    let mut net = FlowNetwork::new(n);
    add_support_edges(&mut net, gf, |i, j| is_t_edge(i, j) || is_t_edge(j, i));
    let mut sink_side: Vec<usize> = cu.difference(cv).iter().collect();
    for w in shared.iter() {
        let twin = net.add_node();
        net.add_edge(w, twin, ArcCapacity::Finite(transferred[w]));
        sink_side.push(twin);
    }
    let source_side: Vec<usize> = cv.iter().collect();
    let s = attach_terminal(&mut net, &source_side, true);
    let t = attach_terminal(&mut net, &sink_side, false);
    net.set_terminals(s, t);
    Ok(net)
}
