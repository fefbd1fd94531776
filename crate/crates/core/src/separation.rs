//! Separation routines: integer points (subcycle analysis), exact fractional
//! separation through minimum cuts, and a cheap component-based heuristic.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cuts::{Cut, CutCounts, CutKind};
use crate::flow::{augment_for_ci, build_cut_network, max_flow_min_cut, MinCutResult};
use crate::instance::{CoverageModel, VertexSet};
use crate::support::SupportGraph;

/// Smallest violation for a cut to count as violated in full separation.
pub const MIN_VIOLATION: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum SeparationError {
    #[error("vertex {0} has odd degree in the integer support")]
    OddDegree(usize),
}

/// How exact fractional separation decides when to stop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExactPolicy {
    /// Scan every pair, keep everything violated.
    Full,
    /// Return the first cut whose violation exceeds `epsilon`.
    FirstFound { epsilon: f64 },
}

impl ExactPolicy {
    fn threshold(self) -> f64 {
        match self {
            ExactPolicy::Full => MIN_VIOLATION,
            ExactPolicy::FirstFound { epsilon } => epsilon,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeparationStats {
    pub counts: CutCounts,
    pub flow_calls: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default)]
pub struct SeparationOutcome {
    pub cuts: Vec<Cut>,
    pub stats: SeparationStats,
}

impl SeparationOutcome {
    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    /// Drops cover-intersection cuts.
    pub fn without_ci(mut self) -> Self {
        self.cuts.retain(|c| c.kind() != CutKind::CoverIntersection);
        self.stats.counts.ci = 0;
        self
    }
}

struct Collector<'a> {
    gf: &'a SupportGraph,
    threshold: f64,
    stop_at_first: bool,
    seen: HashSet<Cut>,
    out: SeparationOutcome,
    start: Instant,
}

impl<'a> Collector<'a> {
    fn new(gf: &'a SupportGraph, threshold: f64, stop_at_first: bool) -> Self {
        Collector {
            gf,
            threshold,
            stop_at_first,
            seen: HashSet::new(),
            out: SeparationOutcome::default(),
            start: Instant::now(),
        }
    }

    fn done(&self) -> bool {
        self.stop_at_first && !self.out.cuts.is_empty()
    }

    /// Keeps `cut` if it is new and violated beyond the threshold.
    fn offer(&mut self, cut: Option<Cut>) -> bool {
        let Some(cut) = cut else { return false };
        if self.done() || cut.violation(self.gf) <= self.threshold || self.seen.contains(&cut) {
            return false;
        }
        self.seen.insert(cut.clone());
        self.out.stats.counts.record(cut.kind());
        self.out.cuts.push(cut);
        true
    }

    fn min_cut(&mut self, side_a: &VertexSet, side_b: &VertexSet) -> Option<MinCutResult> {
        self.out.stats.flow_calls += 1;
        let net = build_cut_network(self.gf, side_a, side_b).ok()?;
        Some(max_flow_min_cut(&net)).filter(|c| c.is_finite())
    }

    fn min_cut_augmented(&mut self, cv: &VertexSet, cu: &VertexSet) -> Option<MinCutResult> {
        self.out.stats.flow_calls += 1;
        let net = augment_for_ci(self.gf, cv, cu).ok()?;
        Some(max_flow_min_cut(&net)).filter(|c| c.is_finite())
    }

    fn finish(mut self) -> SeparationOutcome {
        self.out.stats.elapsed = self.start.elapsed();
        self.out
    }
}

/// Separation for an integer point satisfying the degree and cover rows.
///
/// Each connected component of the support is a subcycle. A component that
/// does not cover the graph yields a γ cut or, failing membership, a vertex cut
/// plus whatever its augmentations `S ∪ C(v)` provide. A component that covers
/// the graph is linked to every other component.
pub fn separate_integer(
    gi: &SupportGraph,
    cov: &CoverageModel,
    with_ci: bool,
) -> Result<SeparationOutcome, SeparationError> {
    for v in 0..gi.n() {
        let degree = gi.neighbors(v).iter().filter(|&&(_, x)| x > 0.5).count();
        if degree % 2 == 1 {
            return Err(SeparationError::OddDegree(v));
        }
    }
    let mut col = Collector::new(gi, MIN_VIOLATION, false);
    let comps = gi.components();
    if comps.len() <= 1 {
        return Ok(col.finish());
    }
    let visited = gi.vertices();
    for (idx, s) in comps.iter().enumerate() {
        if !cov.covers_all(s) {
            if cov.in_gamma(s) {
                col.offer(Cut::gamma(cov, s.clone()).ok());
                continue;
            }
            let anchor = gi.argmax_y(s).expect("components are non-empty");
            col.offer(Cut::vertex(cov, s.clone(), anchor).ok());
            let outside = visited.difference(s);
            for v in s.iter() {
                let s_aug = s.union(cov.cover_of(v));
                if !s_aug.is_disjoint(&outside) {
                    continue;
                }
                if !cov.covers_all(&s_aug) {
                    col.offer(Cut::gamma(cov, s_aug).ok());
                } else if with_ci {
                    for u in 0..gi.n() {
                        let s_u = s.intersection(cov.cover_of(u));
                        if gi.cut_weight(&s_u) > 0.5 {
                            continue;
                        }
                        col.offer(Cut::cover_intersection(cov, s_aug.clone(), u).ok());
                    }
                }
            }
        } else {
            let i = gi.argmax_y(s).expect("components are non-empty");
            for (other_idx, other) in comps.iter().enumerate() {
                if other_idx == idx {
                    continue;
                }
                let j = gi.argmax_y(other).expect("components are non-empty");
                col.offer(Cut::link(s.clone(), i, j).ok());
            }
        }
    }
    Ok(col.finish())
}

/// Exact separation for a fractional point, scanning every ordered pair `(v, u)`.
pub fn separate_fractional_exact(
    gf: &SupportGraph,
    cov: &CoverageModel,
    policy: ExactPolicy,
    with_ci: bool,
) -> SeparationOutcome {
    let stop = matches!(policy, ExactPolicy::FirstFound { .. });
    let mut col = Collector::new(gf, policy.threshold(), stop);
    let n = gf.n();
    let singletons: Vec<VertexSet> = (0..n).map(|v| VertexSet::singleton(n, v)).collect();
    let full_cover: Vec<bool> = (0..n).map(|v| cov.covers_all(cov.cover_of(v))).collect();

    for v in 0..n {
        let cv = cov.cover_of(v);
        for u in 0..n {
            if u == v {
                continue;
            }
            let cu = cov.cover_of(u);
            let disjoint = cv.is_disjoint(cu);

            if !full_cover[v] && disjoint {
                if let Some(cut) = col.min_cut(cv, cu) {
                    if cut.weight() < 2.0 {
                        let s = cut.source_side;
                        let comp = s.complement();
                        if !cov.covers_all(&s) {
                            col.offer(Cut::gamma(cov, s).ok());
                        } else if !cov.covers_all(&comp) {
                            col.offer(Cut::gamma(cov, comp).ok());
                        } else if with_ci {
                            col.offer(Cut::cover_intersection(cov, s, u).ok());
                        }
                    }
                }
            } else if with_ci {
                let cut = if disjoint {
                    col.min_cut(cv, cu)
                } else {
                    col.min_cut_augmented(cv, cu)
                };
                if let Some(cut) = cut {
                    if !cut.source_side.is_full() {
                        col.offer(Cut::cover_intersection(cov, cut.source_side, u).ok());
                    }
                }
            }
            if col.done() {
                return col.finish();
            }

            if gf.y(v) > 0.0 && !cu.contains(v) {
                if let Some(cut) = col.min_cut(&singletons[v], cu) {
                    if cut.weight() < 2.0 * gf.y(v) {
                        let s = cut.source_side;
                        let comp = s.complement();
                        if !cov.covers_all(&s) {
                            let c = if cov.in_gamma(&s) {
                                Cut::gamma(cov, s)
                            } else {
                                Cut::vertex(cov, s, v)
                            };
                            col.offer(c.ok());
                        } else if !cov.covers_all(&comp) {
                            col.offer(Cut::gamma(cov, comp).ok());
                        }
                    }
                }
            }
            if col.done() {
                return col.finish();
            }

            if v < u && gf.y(v) + gf.y(u) > 1.0 {
                if let Some(cut) = col.min_cut(&singletons[v], &singletons[u]) {
                    col.offer(Cut::link(cut.source_side, v, u).ok());
                }
            }
            if col.done() {
                return col.finish();
            }
        }
    }
    col.finish()
}

/// Heuristic fractional separation built from covering sets and support components.
pub fn separate_fractional_heuristic(gf: &SupportGraph, cov: &CoverageModel, with_ci: bool) -> SeparationOutcome {
    let mut col = Collector::new(gf, MIN_VIOLATION, false);
    let n = gf.n();

    for u in 0..n {
        let s = cov.cover_of(u);
        if s.is_full() {
            continue;
        }
        if !cov.covers_all(s) {
            if gf.cut_weight(s) < 2.0 {
                col.offer(Cut::gamma(cov, s.clone()).ok());
            }
        } else if with_ci {
            for v in (0..n).filter(|&v| v != u) {
                col.offer(Cut::cover_intersection(cov, s.clone(), v).ok());
            }
        }
    }

    let comps = gf.components();
    for s in comps.iter().filter(|s| !s.is_full()) {
        if cov.in_gamma(s) {
            if !cov.covers_all(s) {
                col.offer(Cut::gamma(cov, s.clone()).ok());
            } else if with_ci {
                for v in 0..n {
                    col.offer(Cut::cover_intersection(cov, s.clone(), v).ok());
                }
            }
        } else if !cov.covers_all(s) {
            let i = gf.argmax_y(s).expect("components are non-empty");
            col.offer(Cut::vertex(cov, s.clone(), i).ok());
        }
    }

    for (k, sk) in comps.iter().enumerate() {
        let i = gf.argmax_y(sk).expect("components are non-empty");
        for sl in &comps[k + 1..] {
            let j = gf.argmax_y(sl).expect("components are non-empty");
            if gf.y(i) + gf.y(j) > 1.0 {
                col.offer(Cut::link(sk.clone(), i, j).ok());
            }
        }
    }
    col.finish()
}
