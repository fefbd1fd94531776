//! The inequality families used to cut off relaxation points.
//!
//! | kind                | inequality                               |
//! |---------------------|------------------------------------------|
//! | `Sec`, `Link`       | `x(δ(S)) ≥ 2(y_i + y_j − 1)`, `i ∈ S ∌ j` |
//! | `Gamma`             | `x(δ(S)) ≥ 2`, `S ∈ γ`, `D(S) ≠ V`         |
//! | `Vertex`            | `x(δ(S)) ≥ 2y_i`, `S ∉ γ`, `D(S) ≠ V`       |
//! | `CoverIntersection` | `x(δ(S) ∪ δ(S ∩ C(v))) ≥ 2`, `S ∈ γ`       |
//!
//! Constructors enforce each family's preconditions, so a `Cut` value is valid
//! for every feasible tour.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{CoverageModel, Instance, VertexSet};
use crate::lp::{LpRow, Relation, VarLayout};
use crate::support::SupportGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutKind {
    Sec,
    Gamma,
    Vertex,
    Link,
    CoverIntersection,
}

impl CutKind {
    pub fn label(self) -> &'static str {
        match self {
            CutKind::Sec => "sec",
            CutKind::Gamma => "gamma",
            CutKind::Vertex => "vertex",
            CutKind::Link => "link",
            CutKind::CoverIntersection => "ci",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CutError {
    #[error("cut set must be a non-empty proper subset of V")]
    TrivialSet,
    #[error("set is not in gamma")]
    NotInGamma,
    #[error("set is in gamma")]
    InGamma,
    #[error("set covers every vertex")]
    CoversAll,
    #[error("anchor {0} lies on the wrong side of the cut")]
    AnchorSide(usize),
    #[error("S ∩ C({0}) admits a feasible tour on its own")]
    TourInsideIntersection(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    kind: CutKind,
    set: VertexSet,
    anchors: Vec<usize>,
    /// `S ∩ C(v)` for cover-intersection cuts.
    inner: Option<VertexSet>,
}

fn check_proper(set: &VertexSet) -> Result<(), CutError> {
    if set.is_empty() || set.is_full() {
        Err(CutError::TrivialSet)
    } else {
        Ok(())
    }
}

/// Orients a two-anchor cut so that `S` is the smaller side (ties: the side
/// holding vertex 0).
fn canonical_pair(set: VertexSet, i: usize, j: usize) -> (VertexSet, usize, usize) {
    let comp = set.complement();
    let flip = comp.len() < set.len() || (comp.len() == set.len() && comp.contains(0));
    if flip {
        (comp, j, i)
    } else {
        (set, i, j)
    }
}

impl Cut {
    /// `x(δ(S)) ≥ 2`.
    pub fn gamma(cov: &CoverageModel, set: VertexSet) -> Result<Cut, CutError> {
        check_proper(&set)?;
        if !cov.in_gamma(&set) {
            return Err(CutError::NotInGamma);
        }
        if cov.covers_all(&set) {
            return Err(CutError::CoversAll);
        }
        Ok(Cut {
            kind: CutKind::Gamma,
            set,
            anchors: Vec::new(),
            inner: None,
        })
    }

    /// `x(δ(S)) ≥ 2y_i`.
    pub fn vertex(cov: &CoverageModel, set: VertexSet, i: usize) -> Result<Cut, CutError> {
        check_proper(&set)?;
        if cov.in_gamma(&set) {
            return Err(CutError::InGamma);
        }
        if cov.covers_all(&set) {
            return Err(CutError::CoversAll);
        }
        if !set.contains(i) {
            return Err(CutError::AnchorSide(i));
        }
        Ok(Cut {
            kind: CutKind::Vertex,
            set,
            anchors: vec![i],
            inner: None,
        })
    }

    /// `x(δ(S)) ≥ 2(y_i + y_j − 1)`.
    pub fn link(set: VertexSet, i: usize, j: usize) -> Result<Cut, CutError> {
        Self::two_anchor(CutKind::Link, set, i, j)
    }

    /// Subtour elimination row; same algebra as [`Cut::link`].
    pub fn sec(set: VertexSet, i: usize, j: usize) -> Result<Cut, CutError> {
        Self::two_anchor(CutKind::Sec, set, i, j)
    }

    fn two_anchor(kind: CutKind, set: VertexSet, i: usize, j: usize) -> Result<Cut, CutError> {
        check_proper(&set)?;
        if !set.contains(i) {
            return Err(CutError::AnchorSide(i));
        }
        if set.contains(j) {
            return Err(CutError::AnchorSide(j));
        }
        let (set, i, j) = canonical_pair(set, i, j);
        Ok(Cut {
            kind,
            set,
            anchors: vec![i, j],
            inner: None,
        })
    }

    /// `x(δ(S) ∪ δ(S_v)) ≥ 2` with `S_v = S ∩ C(v)`.
    ///
    /// Besides `S ∈ γ`, the row needs `S_v` to be unable to host a covering
    /// tour by itself; otherwise that tour would cross neither cut.
    pub fn cover_intersection(cov: &CoverageModel, set: VertexSet, v: usize) -> Result<Cut, CutError> {
        check_proper(&set)?;
        if !cov.in_gamma(&set) {
            return Err(CutError::NotInGamma);
        }
        let inner = set.intersection(cov.cover_of(v));
        if inner.len() >= 3 && cov.covers_all(&inner) {
            return Err(CutError::TourInsideIntersection(v));
        }
        Ok(Cut {
            kind: CutKind::CoverIntersection,
            set,
            anchors: vec![v],
            inner: Some(inner),
        })
    }

    pub fn kind(&self) -> CutKind {
        self.kind
    }

    pub fn set(&self) -> &VertexSet {
        &self.set
    }

    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    /// `S ∩ C(v)` for cover-intersection cuts.
    pub fn inner(&self) -> Option<&VertexSet> {
        self.inner.as_ref()
    }

    fn in_support(&self, i: usize, j: usize) -> bool {
        let crosses = |s: &VertexSet| s.contains(i) != s.contains(j);
        crosses(&self.set) || self.inner.as_ref().is_some_and(crosses)
    }

    /// Left-hand side on a support graph.
    pub fn lhs(&self, g: &SupportGraph) -> f64 {
        g.edges()
            .iter()
            .filter(|&&(i, j, _)| self.in_support(i, j))
            .map(|&(_, _, val)| val)
            .sum()
    }

    /// Left-hand side on dense vectors indexed like the instance's edges.
    pub fn lhs_dense(&self, inst: &Instance, x: &[f64]) -> f64 {
        inst.edges()
            .iter()
            .zip(x)
            .filter(|&(&(i, j), _)| self.in_support(i, j))
            .map(|(_, &val)| val)
            .sum()
    }

    pub fn rhs(&self, y: &[f64]) -> f64 {
        match self.kind {
            CutKind::Gamma | CutKind::CoverIntersection => 2.0,
            CutKind::Vertex => 2.0 * y[self.anchors[0]],
            CutKind::Link | CutKind::Sec => 2.0 * (y[self.anchors[0]] + y[self.anchors[1]] - 1.0),
        }
    }

    /// `rhs − lhs`; positive when the point violates the cut.
    pub fn violation(&self, g: &SupportGraph) -> f64 {
        self.rhs(g.y_values()) - self.lhs(g)
    }

    pub fn violation_dense(&self, inst: &Instance, x: &[f64], y: &[f64]) -> f64 {
        self.rhs(y) - self.lhs_dense(inst, x)
    }

    /// Whether the tour through `tour` (a vertex cycle) satisfies the cut.
    pub fn holds_for_tour(&self, n: usize, tour: &[usize]) -> bool {
        let mut y = vec![0.0; n];
        for &v in tour {
            y[v] = 1.0;
        }
        let crossings = (0..tour.len())
            .filter(|&p| self.in_support(tour[p], tour[(p + 1) % tour.len()]))
            .count();
        crossings as f64 >= self.rhs(&y)
    }

    pub fn to_lp_row(&self, inst: &Instance) -> LpRow {
        let layout = VarLayout::of(inst);
        let mut coefs: Vec<(usize, f64)> = inst
            .edges()
            .iter()
            .enumerate()
            .filter(|&(_, &(i, j))| self.in_support(i, j))
            .map(|(e, _)| (layout.x(e), 1.0))
            .collect();
        let rhs = match self.kind {
            CutKind::Gamma | CutKind::CoverIntersection => 2.0,
            CutKind::Vertex => {
                coefs.push((layout.y(self.anchors[0]), -2.0));
                0.0
            }
            CutKind::Link | CutKind::Sec => {
                coefs.push((layout.y(self.anchors[0]), -2.0));
                coefs.push((layout.y(self.anchors[1]), -2.0));
                -2.0
            }
        };
        LpRow::new(coefs, Relation::Ge, rhs)
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.label(), self.set)?;
        for a in &self.anchors {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

/// Per-family counters, as reported by solver runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCounts {
    pub gamma: usize,
    pub vertex: usize,
    pub link: usize,
    pub ci: usize,
}

impl CutCounts {
    pub fn record(&mut self, kind: CutKind) {
        match kind {
            CutKind::Gamma => self.gamma += 1,
            CutKind::Vertex => self.vertex += 1,
            CutKind::Link | CutKind::Sec => self.link += 1,
            CutKind::CoverIntersection => self.ci += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.gamma + self.vertex + self.link + self.ci
    }

    pub fn add(&mut self, other: &CutCounts) {
        self.gamma += other.gamma;
        self.vertex += other.vertex;
        self.link += other.link;
        self.ci += other.ci;
    }
}

/// Append-only store of distinct cuts.
#[derive(Clone, Debug, Default)]
pub struct CutPool {
    cuts: Vec<Cut>,
    seen: HashSet<Cut>,
    counts: CutCounts,
}

impl CutPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the new cut's index, or `None` if an equal cut is already stored.
    pub fn insert(&mut self, cut: Cut) -> Option<usize> {
        if self.seen.contains(&cut) {
            return None;
        }
        self.seen.insert(cut.clone());
        self.counts.record(cut.kind());
        self.cuts.push(cut);
        Some(self.cuts.len() - 1)
    }

    pub fn contains(&self, cut: &Cut) -> bool {
        self.seen.contains(cut)
    }

    pub fn get(&self, idx: usize) -> &Cut {
        &self.cuts[idx]
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Cut> {
        self.cuts.iter()
    }

    pub fn counts(&self) -> CutCounts {
        self.counts
    }
}
