//! Weighted graph induced by the positive entries of a solution pair `{x, y}`.

use crate::instance::{Instance, VertexSet};

/// Entries at or below this value are treated as zero.
pub const SUPPORT_EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct SupportGraph {
    n: usize,
    y: Vec<f64>,
    vertices: VertexSet,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl SupportGraph {
    /// Builds the support of a full solution: `x` is indexed by the instance's edge
    /// order, `y` by vertex.
    pub fn from_solution(inst: &Instance, x: &[f64], y: &[f64]) -> Self {
        assert_eq!(x.len(), inst.edge_count());
        assert_eq!(y.len(), inst.n());
        let edges = inst
            .edges()
            .iter()
            .zip(x)
            .filter(|(_, &val)| val > SUPPORT_EPS)
            .map(|(&(i, j), &val)| (i, j, val))
            .collect();
        Self::from_edges(inst.n(), y.to_vec(), edges)
    }

    pub fn from_edges(n: usize, y: Vec<f64>, edges: Vec<(usize, usize, f64)>) -> Self {
        assert_eq!(y.len(), n);
        let edges: Vec<(usize, usize, f64)> = edges
            .into_iter()
            .filter(|&(_, _, val)| val > SUPPORT_EPS)
            .map(|(i, j, val)| if i < j { (i, j, val) } else { (j, i, val) })
            .collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j, val) in &edges {
            adjacency[i].push((j, val));
            adjacency[j].push((i, val));
        }
        let vertices = VertexSet::from_vertices(n, (0..n).filter(|&v| y[v] > SUPPORT_EPS));
        SupportGraph {
            n,
            y,
            vertices,
            edges,
            adjacency,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn y(&self, v: usize) -> f64 {
        self.y[v]
    }

    pub fn y_values(&self) -> &[f64] {
        &self.y
    }

    /// Vertices with positive weight.
    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn degree_weight(&self, v: usize) -> f64 {
        self.adjacency[v].iter().map(|&(_, val)| val).sum()
    }

    /// `Σ_{e ∈ δ(S)} x_e`.
    pub fn cut_weight(&self, set: &VertexSet) -> f64 {
        self.edges
            .iter()
            .filter(|&&(i, j, _)| set.contains(i) != set.contains(j))
            .map(|&(_, _, val)| val)
            .sum()
    }

    /// `Σ_{e ∈ δ(A) ∪ δ(B)} x_e`, counting shared edges once.
    pub fn union_cut_weight(&self, a: &VertexSet, b: &VertexSet) -> f64 {
        self.edges
            .iter()
            .filter(|&&(i, j, _)| a.contains(i) != a.contains(j) || b.contains(i) != b.contains(j))
            .map(|&(_, _, val)| val)
            .sum()
    }

    /// Connected components over the positive-weight vertices, ordered by smallest member.
    pub fn components(&self) -> Vec<VertexSet> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in self.vertices.iter() {
            if seen[start] {
                continue;
            }
            let mut comp = VertexSet::empty(self.n);
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for &(u, _) in &self.adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Vertex of `set` with the largest `y`, ties to the smaller index.
    pub fn argmax_y(&self, set: &VertexSet) -> Option<usize> {
        set.iter().fold(None, |best, v| match best {
            Some(b) if self.y[b] >= self.y[v] => Some(b),
            _ => Some(v),
        })
    }
}
