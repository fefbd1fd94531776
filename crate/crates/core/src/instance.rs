//! Problem data: TSPLIB loading, the complete-graph cost matrix, coverage sets
//! and the vertex-set algebra shared by the rest of the crate.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("missing header field {0}")]
    MissingField(&'static str),
    #[error("duplicate header field {0}")]
    DuplicateField(String),
    #[error("unsupported edge weight type {0} (only EUC_2D is supported)")]
    UnsupportedFormat(String),
    #[error("truncated coordinate section: expected {expected} nodes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("k out of range: k = {k}, must lie in 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("cut undefined for an empty set or the full vertex set")]
    TrivialCut,
    #[error("invalid coverage: {0}")]
    InvalidCoverage(String),
    #[error("invalid cost matrix: {0}")]
    InvalidCosts(String),
}

/// A planar vertex. `id` is 0-based; TSPLIB ids are `id + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// TSPLIB nearest-integer rounding.
pub fn nint(d: f64) -> i64 {
    (d + 0.5).floor() as i64
}

/// Complete undirected graph with integer edge costs.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub name: String,
    points: Vec<Point>,
    cost: Vec<i64>,
    edges: Vec<(usize, usize)>,
}

impl Instance {
    /// Builds an instance with TSPLIB EUC_2D costs.
    pub fn from_points(name: impl Into<String>, coords: &[(f64, f64)]) -> Result<Self, InstanceError> {
        let points: Vec<Point> = coords
            .iter()
            .enumerate()
            .map(|(id, &(x, y))| Point { id, x, y })
            .collect();
        if points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(InstanceError::InvalidCosts("non-finite coordinate".into()));
        }
        let n = points.len();
        let mut cost = vec![0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let c = nint(points[i].dist(&points[j]));
                cost[i * n + j] = c;
                cost[j * n + i] = c;
            }
        }
        Self::assemble(name.into(), points, cost)
    }

    /// Builds an instance from an explicit symmetric cost matrix. Coordinates are only
    /// used for plotting.
    pub fn from_cost_matrix(
        name: impl Into<String>,
        coords: &[(f64, f64)],
        matrix: &[Vec<i64>],
    ) -> Result<Self, InstanceError> {
        let n = coords.len();
        if matrix.len() != n || matrix.iter().any(|row| row.len() != n) {
            return Err(InstanceError::InvalidCosts(format!("matrix is not {n}x{n}")));
        }
        let mut cost = vec![0; n * n];
        for i in 0..n {
            if matrix[i][i] != 0 {
                return Err(InstanceError::InvalidCosts(format!("cost[{i}][{i}] != 0")));
            }
            for j in 0..n {
                if matrix[i][j] < 0 || matrix[i][j] != matrix[j][i] {
                    return Err(InstanceError::InvalidCosts(format!(
                        "cost[{i}][{j}] must be non-negative and symmetric"
                    )));
                }
                cost[i * n + j] = matrix[i][j];
            }
        }
        let points = coords
            .iter()
            .enumerate()
            .map(|(id, &(x, y))| Point { id, x, y })
            .collect();
        Self::assemble(name.into(), points, cost)
    }

    fn assemble(name: String, points: Vec<Point>, cost: Vec<i64>) -> Result<Self, InstanceError> {
        let n = points.len();
        if n == 0 {
            return Err(InstanceError::InvalidCosts("instance has no vertices".into()));
        }
        let mut edges = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Ok(Instance {
            name,
            points,
            cost,
            edges,
        })
    }

    /// Random instance with integer coordinates drawn uniformly from `[0, side)²`.
    pub fn random(name: impl Into<String>, n: usize, side: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.gen_range(0..side) as f64, rng.gen_range(0..side) as f64))
            .collect();
        Self::from_points(name, &coords).expect("random coordinates are finite")
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn cost(&self, i: usize, j: usize) -> i64 {
        self.cost[i * self.n() + j]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Endpoints `(i, j)` with `i < j` of every edge, in edge-index order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn edge_cost(&self, e: usize) -> i64 {
        let (i, j) = self.edges[e];
        self.cost(i, j)
    }

    /// Index of edge `{i, j}` in the lexicographic edge order.
    pub fn edge_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i != j);
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let n = self.n();
        i * n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Length of the closed tour visiting `tour` in order.
    pub fn tour_cost(&self, tour: &[usize]) -> i64 {
        if tour.len() < 2 {
            return 0;
        }
        tour.iter()
            .zip(tour.iter().cycle().skip(1))
            .map(|(&a, &b)| self.cost(a, b))
            .sum()
    }

    /// δ(S): edges with exactly one endpoint in `set`.
    pub fn cut_edge_set(&self, set: &VertexSet) -> Result<Vec<(usize, usize)>, InstanceError> {
        if set.is_empty() || set.len() == self.n() {
            return Err(InstanceError::TrivialCut);
        }
        Ok(self
            .edges
            .iter()
            .copied()
            .filter(|&(i, j)| set.contains(i) != set.contains(j))
            .collect())
    }

    /// E(S): edges with both endpoints in `set`.
    pub fn interior_edge_set(&self, set: &VertexSet) -> Vec<(usize, usize)> {
        let members: Vec<usize> = set.iter().collect();
        let mut out = Vec::new();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                out.push((i, j));
            }
        }
        out
    }

    /// Serializes the coordinates as a TSPLIB EUC_2D file.
    pub fn to_tsplib(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("NAME : {}\n", self.name));
        out.push_str("TYPE : TSP\n");
        out.push_str(&format!("DIMENSION : {}\n", self.n()));
        out.push_str("EDGE_WEIGHT_TYPE : EUC_2D\n");
        out.push_str("NODE_COORD_SECTION\n");
        for p in &self.points {
            out.push_str(&format!("{} {} {}\n", p.id + 1, p.x, p.y));
        }
        out.push_str("EOF\n");
        out
    }
}

/// Parses a TSPLIB `.tsp` file with `EDGE_WEIGHT_TYPE: EUC_2D`.
pub fn parse_tsplib(text: &str) -> Result<Instance, InstanceError> {
    let mut name: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut problem_type: Option<String> = None;
    let mut coords_start = None;

    let mut lines = text.lines().enumerate();
    for (line_no, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => match line.split_once(char::is_whitespace) {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (line, ""),
            },
        };
        let key = key.to_ascii_uppercase();
        let set = |slot: &mut Option<String>, field: &str| {
            if slot.is_some() {
                return Err(InstanceError::DuplicateField(field.to_string()));
            }
            *slot = Some(value.to_string());
            Ok(())
        };
        match key.as_str() {
            "NAME" => set(&mut name, "NAME")?,
            "TYPE" => set(&mut problem_type, "TYPE")?,
            "EDGE_WEIGHT_TYPE" => set(&mut weight_type, "EDGE_WEIGHT_TYPE")?,
            "DIMENSION" => {
                if dimension.is_some() {
                    return Err(InstanceError::DuplicateField("DIMENSION".into()));
                }
                let d = value.parse::<usize>().map_err(|_| InstanceError::Malformed {
                    line: line_no + 1,
                    msg: format!("invalid DIMENSION {value:?}"),
                })?;
                dimension = Some(d);
            }
            "NODE_COORD_SECTION" => {
                coords_start = Some(line_no + 1);
                break;
            }
            "EOF" => break,
            _ => {}
        }
    }

    let name = name.ok_or(InstanceError::MissingField("NAME"))?;
    let dimension = dimension.ok_or(InstanceError::MissingField("DIMENSION"))?;
    let weight_type = weight_type.ok_or(InstanceError::MissingField("EDGE_WEIGHT_TYPE"))?;
    if weight_type.to_ascii_uppercase() != "EUC_2D" {
        return Err(InstanceError::UnsupportedFormat(weight_type));
    }
    if dimension == 0 {
        return Err(InstanceError::Malformed {
            line: 0,
            msg: "DIMENSION must be positive".into(),
        });
    }
    if coords_start.is_none() {
        return Err(InstanceError::MissingField("NODE_COORD_SECTION"));
    }

    let mut entries = Vec::with_capacity(dimension);
    for (line_no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.eq_ignore_ascii_case("EOF") {
            break;
        }
        let malformed = |msg: String| InstanceError::Malformed {
            line: line_no + 1,
            msg,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(malformed(format!("expected `id x y`, got {line:?}")));
        }
        let id = usize::from_str(fields[0]).map_err(|_| malformed(format!("bad node id {:?}", fields[0])))?;
        let x = f64::from_str(fields[1]).map_err(|_| malformed(format!("bad coordinate {:?}", fields[1])))?;
        let y = f64::from_str(fields[2]).map_err(|_| malformed(format!("bad coordinate {:?}", fields[2])))?;
        if !x.is_finite() || !y.is_finite() {
            return Err(malformed("non-finite coordinate".into()));
        }
        entries.push((line_no + 1, id, x, y));
    }
    if entries.len() != dimension {
        return Err(InstanceError::Truncated {
            expected: dimension,
            found: entries.len(),
        });
    }
    let mut coords: Vec<Option<(f64, f64)>> = vec![None; dimension];
    for (line, id, x, y) in entries {
        if id == 0 || id > dimension {
            return Err(InstanceError::Malformed {
                line,
                msg: format!("node id {id} outside 1..={dimension}"),
            });
        }
        if coords[id - 1].replace((x, y)).is_some() {
            return Err(InstanceError::Malformed {
                line,
                msg: format!("node {id} listed twice"),
            });
        }
    }
    let coords: Vec<(f64, f64)> = coords.into_iter().map(|c| c.expect("all ids seen")).collect();
    Instance::from_points(name, &coords)
}

/// A subset of the vertices `0..n` of one instance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(FixedBitSet);

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        VertexSet(bits)
    }

    pub fn singleton(n: usize, v: usize) -> Self {
        let mut s = Self::empty(n);
        s.insert(v);
        s
    }

    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(n);
        for v in vertices {
            s.insert(v);
        }
        s
    }

    /// Size of the ground set.
    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, v: usize) {
        self.0.insert(v);
    }

    pub fn remove(&mut self, v: usize) {
        self.0.set(v, false);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.capacity()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.0.union_with(&other.0);
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.0.intersect_with(&other.0);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.0.difference_with(&other.0);
        s
    }

    pub fn complement(&self) -> VertexSet {
        let mut s = self.clone();
        s.0.toggle_range(..);
        s
    }

    pub fn first(&self) -> Option<usize> {
        self.0.minimum()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (idx, v) in self.iter().enumerate() {
            if idx > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Covering sets `C(v)` (who covers `v`) and covered sets `D(v)` (whom `v` covers).
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageModel {
    k: Option<usize>,
    cover_of: Vec<VertexSet>,
    covers: Vec<VertexSet>,
}

impl CoverageModel {
    /// `C(v)` is `v` plus its `k` nearest other vertices; distance ties go to the
    /// smaller index.
    pub fn build(inst: &Instance, k: usize) -> Result<Self, InstanceError> {
        let n = inst.n();
        if k == 0 || k + 1 > n {
            return Err(InstanceError::KOutOfRange {
                k,
                max: n.saturating_sub(1),
            });
        }
        let cover_of = (0..n)
            .map(|v| {
                let mut others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
                others.sort_by_key(|&u| (inst.cost(v, u), u));
                VertexSet::from_vertices(n, std::iter::once(v).chain(others[..k].iter().copied()))
            })
            .collect();
        let mut model = Self::from_cover_sets(cover_of)?;
        model.k = Some(k);
        Ok(model)
    }

    /// Builds a model from explicit `C(v)` sets; each must contain `v`.
    pub fn from_cover_sets(cover_of: Vec<VertexSet>) -> Result<Self, InstanceError> {
        let n = cover_of.len();
        for (v, set) in cover_of.iter().enumerate() {
            if set.capacity() != n {
                return Err(InstanceError::InvalidCoverage(format!(
                    "C({v}) has capacity {} but n = {n}",
                    set.capacity()
                )));
            }
            if !set.contains(v) {
                return Err(InstanceError::InvalidCoverage(format!("{v} is not in C({v})")));
            }
        }
        let mut covers = vec![VertexSet::empty(n); n];
        for (v, set) in cover_of.iter().enumerate() {
            for u in set.iter() {
                covers[u].insert(v);
            }
        }
        Ok(CoverageModel {
            k: None,
            cover_of,
            covers,
        })
    }

    /// Every vertex covers only itself (the plain TSP).
    pub fn self_only(n: usize) -> Self {
        Self::from_cover_sets((0..n).map(|v| VertexSet::singleton(n, v)).collect())
            .expect("singletons are valid")
    }

    /// Every vertex covers every vertex.
    pub fn everything(n: usize) -> Self {
        Self::from_cover_sets(vec![VertexSet::full(n); n]).expect("full sets are valid")
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn n(&self) -> usize {
        self.cover_of.len()
    }

    /// `C(v)`.
    pub fn cover_of(&self, v: usize) -> &VertexSet {
        &self.cover_of[v]
    }

    /// `D(v)`.
    pub fn covers(&self, v: usize) -> &VertexSet {
        &self.covers[v]
    }

    /// Whether some `v ∈ S` has `C(v) ⊆ S`.
    pub fn in_gamma(&self, set: &VertexSet) -> bool {
        set.iter().any(|v| self.cover_of[v].is_subset(set))
    }

    /// `D(S)`.
    pub fn covered_union(&self, set: &VertexSet) -> VertexSet {
        let mut out = VertexSet::empty(self.n());
        for v in set.iter() {
            out.union_with(&self.covers[v]);
        }
        out
    }

    /// `D(S) = V`.
    pub fn covers_all(&self, set: &VertexSet) -> bool {
        (0..self.n()).all(|u| !self.cover_of[u].is_disjoint(set))
    }

    /// Whether visiting exactly `set` covers every vertex.
    pub fn is_cover(&self, set: &VertexSet) -> bool {
        self.covers_all(set)
    }
}
