//! Branch-and-cut driver.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cuts::{Cut, CutCounts, CutPool};
use crate::heuristic::{primal_heuristic, tour_from_seed};
use crate::instance::{CoverageModel, Instance, VertexSet};
use crate::lp::{build_root_model, is_integral, LpEngine, LpError, LpStatus, VarLayout};
use crate::oracle::canonical_tour;
use crate::separation::{
    separate_fractional_exact, separate_fractional_heuristic, separate_integer, ExactPolicy, SeparationError,
    SeparationOutcome,
};
use crate::support::SupportGraph;

/// Slack used when comparing a fractional LP bound against an integer incumbent.
const BOUND_TOL: f64 = 1e-6;

/// The five separation configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    /// Integer separation only.
    #[serde(rename = "I")]
    I,
    /// Exact fractional separation; first-found below the root.
    #[serde(rename = "IFvp")]
    IFvp,
    #[serde(rename = "IFvpX")]
    IFvpX,
    /// Exact fractional separation at the root, heuristic below.
    #[serde(rename = "IFh")]
    IFh,
    #[serde(rename = "IFhX")]
    IFhX,
}

impl Mode {
    pub const ALL: [Mode; 5] = [Mode::I, Mode::IFvp, Mode::IFvpX, Mode::IFh, Mode::IFhX];

    pub fn flag(self) -> &'static str {
        match self {
            Mode::I => "I",
            Mode::IFvp => "IFvp",
            Mode::IFvpX => "IFvpX",
            Mode::IFh => "IFh",
            Mode::IFhX => "IFhX",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::I => "CSP-I",
            Mode::IFvp => "CSP-I&F_vp",
            Mode::IFvpX => "CSP-I&F_vp-X",
            Mode::IFh => "CSP-I&F_h",
            Mode::IFhX => "CSP-I&F_h-X",
        }
    }

    /// Whether cover-intersection cuts are separated.
    pub fn with_ci(self) -> bool {
        matches!(self, Mode::IFvpX | Mode::IFhX)
    }

    pub fn fractional(self) -> bool {
        self != Mode::I
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.flag())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.flag().eq_ignore_ascii_case(s) || m.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown mode {s:?} (expected one of I, IFvp, IFvpX, IFh, IFhX)"))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub mode: Mode,
    /// Violation threshold for first-found separation.
    pub epsilon: f64,
    pub time_limit: Duration,
    pub seed: u64,
    /// Separation rounds allowed at the root.
    pub root_round_cap: usize,
    /// Separation rounds allowed at other nodes.
    pub node_round_cap: usize,
    pub node_limit: Option<usize>,
    /// Randomized restarts of the primal heuristic.
    pub heuristic_restarts: usize,
    /// Re-check every emitted cut against the point that produced it.
    pub audit: bool,
    /// Keep every emitted cut in the result.
    pub record_cuts: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: Mode::IFhX,
            epsilon: 1.0,
            time_limit: Duration::from_secs(3600),
            seed: 0,
            root_round_cap: 200,
            node_round_cap: 50,
            node_limit: None,
            heuristic_restarts: 16,
            audit: true,
            record_cuts: false,
        }
    }
}

impl SolverConfig {
    pub fn with_mode(mode: Mode) -> Self {
        SolverConfig {
            mode,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Feasible,
    BoundOnly,
    TimeoutNoIncumbent,
}

impl SolveStatus {
    pub fn label(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::BoundOnly => "bound-only",
            SolveStatus::TimeoutNoIncumbent => "timeout-no-incumbent",
        }
    }
}

/// Cut checks performed during a solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AuditStats {
    pub checked: usize,
    pub failures: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub nodes: usize,
    pub cuts: CutCounts,
    pub root_bound: f64,
    pub root_rounds: usize,
    pub lp_solves: usize,
    pub duplicate_cuts: usize,
    pub separation_time: Duration,
    pub elapsed: Duration,
    pub audit: AuditStats,
}

/// A cut together with the violation it had at the point that triggered it.
#[derive(Clone, Debug, PartialEq)]
pub struct EmittedCut {
    pub cut: Cut,
    pub violation: f64,
    pub threshold: f64,
    pub node: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub lower_bound: f64,
    pub upper_bound: Option<i64>,
    /// `(UB − LB)/UB · 100`, or 100 without an incumbent.
    pub gap: f64,
    pub tour: Option<Vec<usize>>,
    pub status: SolveStatus,
    pub stats: SolveStats,
    pub emitted: Vec<EmittedCut>,
}

impl SolveResult {
    /// A proven optimum with no search statistics.
    pub fn exact(value: i64, tour: Vec<usize>, elapsed: Duration) -> Self {
        SolveResult {
            lower_bound: value as f64,
            upper_bound: Some(value),
            gap: 0.0,
            tour: Some(tour),
            status: SolveStatus::Optimal,
            stats: SolveStats {
                root_bound: value as f64,
                elapsed,
                ..SolveStats::default()
            },
            emitted: Vec::new(),
        }
    }

    pub fn value(&self) -> Option<i64> {
        self.upper_bound
    }
}

pub fn optimality_gap(lb: f64, ub: Option<i64>) -> f64 {
    match ub {
        None => 100.0,
        Some(0) => 0.0,
        Some(ub) => (ub as f64 - lb) / ub as f64 * 100.0,
    }
}

#[derive(Debug, Error)]
pub enum BncError {
    #[error("instance needs at least 3 vertices")]
    TooSmall,
    #[error("coverage model has {cov} vertices, instance has {inst}")]
    Mismatch { inst: usize, cov: usize },
    #[error("root relaxation is infeasible")]
    InfeasibleRoot,
    #[error("integer point is cut by no new row")]
    Stalled,
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Separation(#[from] SeparationError),
}

/// Variable chosen for branching.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchVar {
    Y(usize),
    X(usize),
}

/// Picks the `y` closest to 0.5 (ties: larger `|D(v)|`, then smaller index); if
/// every `y` is integral, the `x` closest to 0.5 (ties: smaller index).
pub fn choose_branch(cov: &CoverageModel, x: &[f64], y: &[f64]) -> Option<BranchVar> {
    let key = |v: f64| (v - 0.5).abs();
    let by_y = (0..y.len()).filter(|&v| !is_integral(y[v])).min_by(|&a, &b| {
        key(y[a])
            .total_cmp(&key(y[b]))
            .then(cov.covers(b).len().cmp(&cov.covers(a).len()))
            .then(a.cmp(&b))
    });
    if let Some(v) = by_y {
        return Some(BranchVar::Y(v));
    }
    (0..x.len())
        .filter(|&e| !is_integral(x[e]))
        .min_by(|&a, &b| key(x[a]).total_cmp(&key(x[b])).then(a.cmp(&b)))
        .map(BranchVar::X)
}

/// Open subproblem: a list of fixed columns and the bound inherited from its parent.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchNode {
    pub id: usize,
    pub depth: usize,
    pub bound: f64,
    pub fixings: Vec<(usize, f64)>,
}

impl SearchNode {
    pub fn root() -> Self {
        SearchNode {
            id: 0,
            depth: 0,
            bound: f64::NEG_INFINITY,
            fixings: Vec::new(),
        }
    }
}

/// Splits `node` on the variable picked by [`choose_branch`]. The children fix it
/// to 0 and to 1 and inherit `bound`, the LP value of `values`.
pub fn branch(
    layout: &VarLayout,
    cov: &CoverageModel,
    node: &SearchNode,
    values: &[f64],
    bound: f64,
    next_id: usize,
) -> Option<[SearchNode; 2]> {
    let (x, y) = layout.split(values);
    let col = match choose_branch(cov, x, y)? {
        BranchVar::Y(v) => layout.y(v),
        BranchVar::X(e) => layout.x(e),
    };
    let child = |id: usize, val: f64| {
        let mut fixings = node.fixings.clone();
        fixings.push((col, val));
        SearchNode {
            id,
            depth: node.depth + 1,
            bound,
            fixings,
        }
    };
    Some([child(next_id, 0.0), child(next_id + 1, 1.0)])
}

struct Queued(SearchNode);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // Max-heap order: smallest bound first, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .bound
            .total_cmp(&self.0.bound)
            .then(self.0.depth.cmp(&other.0.depth))
            .then(other.0.id.cmp(&self.0.id))
    }
}

enum NodeEnd {
    Pruned,
    Solved,
    Branched([SearchNode; 2]),
    TimedOut,
}

struct Search<'a> {
    inst: &'a Instance,
    cov: &'a CoverageModel,
    config: &'a SolverConfig,
    layout: VarLayout,
    engine: LpEngine,
    pool: CutPool,
    incumbent: Option<(i64, Vec<usize>)>,
    stats: SolveStats,
    emitted: Vec<EmittedCut>,
    fixed: Vec<usize>,
    next_id: usize,
    deadline: Instant,
    rng: ChaCha8Rng,
}

/// Runs branch and cut.
pub fn solve(inst: &Instance, cov: &CoverageModel, config: &SolverConfig) -> Result<SolveResult, BncError> {
    let start = Instant::now();
    let mut search = Search::new(inst, cov, config, start)?;
    info!(
        "start instance={} n={} k={:?} mode={}",
        inst.name,
        inst.n(),
        cov.k(),
        config.mode.label()
    );
    search.seed_incumbent();
    let lower = search.run()?;
    let mut result = search.finish(lower);
    result.stats.elapsed = start.elapsed();
    info!(
        "done status={} lb={} ub={:?} gap={:.2} nodes={} time={:.3}s",
        result.status.label(),
        result.lower_bound,
        result.upper_bound,
        result.gap,
        result.stats.nodes,
        result.stats.elapsed.as_secs_f64()
    );
    Ok(result)
}

/// Runs the root cut loop with no incumbent, so the relaxation is never cut
/// short by pruning. The returned stats carry the final root LP value.
pub fn root_relaxation(inst: &Instance, cov: &CoverageModel, config: &SolverConfig) -> Result<SolveStats, BncError> {
    let start = Instant::now();
    let mut search = Search::new(inst, cov, config, start)?;
    search.stats.nodes = 1;
    search.process(&SearchNode::root())?;
    let mut stats = search.stats;
    stats.cuts = search.pool.counts();
    stats.elapsed = start.elapsed();
    Ok(stats)
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, cov: &'a CoverageModel, config: &'a SolverConfig, start: Instant) -> Result<Self, BncError> {
        if inst.n() < 3 {
            return Err(BncError::TooSmall);
        }
        if inst.n() != cov.n() {
            return Err(BncError::Mismatch {
                inst: inst.n(),
                cov: cov.n(),
            });
        }
        let model = build_root_model(inst, cov);
        Ok(Search {
            inst,
            cov,
            config,
            layout: VarLayout::of(inst),
            engine: LpEngine::new(&model)?,
            pool: CutPool::new(),
            incumbent: None,
            stats: SolveStats::default(),
            emitted: Vec::new(),
            fixed: Vec::new(),
            next_id: 1,
            deadline: start + config.time_limit,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
        })
    }

    fn timed_out(&self) -> bool {
        Instant::now() >= self.deadline
    }

    fn seed_incumbent(&mut self) {
        let tour = primal_heuristic(self.inst, self.cov, &mut self.rng, 0.0);
        self.offer_tour(tour);
        for _ in 0..self.config.heuristic_restarts {
            let tour = primal_heuristic(self.inst, self.cov, &mut self.rng, 0.3);
            self.offer_tour(tour);
        }
    }

    fn offer_tour(&mut self, tour: Vec<usize>) {
        debug_assert!(self.is_feasible_tour(&tour));
        let value = self.inst.tour_cost(&tour);
        if self.incumbent.as_ref().map_or(true, |(best, _)| value < *best) {
            info!("incumbent value={value} size={}", tour.len());
            self.incumbent = Some((value, canonical_tour(&tour)));
        }
    }

    fn is_feasible_tour(&self, tour: &[usize]) -> bool {
        let set = VertexSet::from_vertices(self.inst.n(), tour.iter().copied());
        tour.len() >= 3 && set.len() == tour.len() && self.cov.is_cover(&set)
    }

    fn upper(&self) -> Option<i64> {
        self.incumbent.as_ref().map(|(v, _)| *v)
    }

    /// Whether an LP value cannot lead to a strictly better integer tour.
    fn dominated(&self, bound: f64) -> bool {
        self.upper().is_some_and(|ub| (bound - BOUND_TOL).ceil() >= ub as f64)
    }

    /// Returns the best proven lower bound.
    fn run(&mut self) -> Result<f64, BncError> {
        let mut heap = BinaryHeap::new();
        heap.push(Queued(SearchNode::root()));
        let mut stopped_bound: Option<f64> = None;
        while let Some(Queued(node)) = heap.pop() {
            if self.dominated(node.bound) {
                continue;
            }
            if self.timed_out() || self.config.node_limit.is_some_and(|cap| self.stats.nodes >= cap) {
                stopped_bound = Some(node.bound);
                break;
            }
            self.stats.nodes += 1;
            match self.process(&node)? {
                NodeEnd::Pruned | NodeEnd::Solved => {}
                NodeEnd::Branched(children) => {
                    for c in children {
                        heap.push(Queued(c));
                    }
                }
                NodeEnd::TimedOut => {
                    stopped_bound = Some(node.bound);
                    break;
                }
            }
        }
        let open_min = heap
            .iter()
            .map(|q| q.0.bound)
            .chain(stopped_bound)
            .fold(f64::INFINITY, f64::min);
        Ok(open_min)
    }

    fn apply_fixings(&mut self, node: &SearchNode) -> Result<(), BncError> {
        for col in std::mem::take(&mut self.fixed) {
            self.engine.set_bounds(col, 0.0, 1.0)?;
        }
        for &(col, val) in &node.fixings {
            self.engine.set_bounds(col, val, val)?;
            self.fixed.push(col);
        }
        Ok(())
    }

    fn process(&mut self, node: &SearchNode) -> Result<NodeEnd, BncError> {
        self.apply_fixings(node)?;
        let root = node.depth == 0;
        let cap = if root {
            self.config.root_round_cap
        } else {
            self.config.node_round_cap
        };
        let mut rounds = 0;
        loop {
            if self.timed_out() {
                return Ok(NodeEnd::TimedOut);
            }
            let sol = self.engine.solve()?;
            self.stats.lp_solves += 1;
            if sol.status == LpStatus::Infeasible {
                if root {
                    return Err(BncError::InfeasibleRoot);
                }
                debug!("node {} infeasible", node.id);
                return Ok(NodeEnd::Pruned);
            }
            let obj = sol.objective_value;
            debug!("node {} depth={} round={rounds} lp={obj:.6}", node.id, node.depth);
            if root {
                self.stats.root_bound = obj;
                self.stats.root_rounds = rounds;
            }
            if self.dominated(obj) {
                return Ok(NodeEnd::Pruned);
            }
            let (x, y) = self.layout.split(&sol.values);
            if x.iter().chain(y).all(|&v| is_integral(v)) {
                let xr: Vec<f64> = x.iter().map(|v| v.round()).collect();
                let yr: Vec<f64> = y.iter().map(|v| v.round()).collect();
                let gi = SupportGraph::from_solution(self.inst, &xr, &yr);
                let out = separate_integer(&gi, self.cov, self.config.mode.with_ci())?;
                if out.is_empty() {
                    let tour = extract_tour(&gi);
                    self.offer_tour(tour);
                    return Ok(NodeEnd::Solved);
                }
                if self.add_cuts(out, node, x, y, 0.0) == 0 {
                    return Err(BncError::Stalled);
                }
                continue;
            }
            if self.config.mode.fractional() && rounds < cap {
                let (out, threshold) = self.separate_fractional(root, x, y);
                if self.add_cuts(out, node, x, y, threshold) > 0 {
                    rounds += 1;
                    continue;
                }
            }
            self.round_lp(y);
            if self.dominated(obj) {
                return Ok(NodeEnd::Pruned);
            }
            let children = branch(&self.layout, self.cov, node, &sol.values, obj, self.next_id)
                .expect("fractional point has a fractional column");
            self.next_id += 2;
            return Ok(NodeEnd::Branched(children));
        }
    }

    fn separate_fractional(&mut self, root: bool, x: &[f64], y: &[f64]) -> (SeparationOutcome, f64) {
        let gf = SupportGraph::from_solution(self.inst, x, y);
        let with_ci = self.config.mode.with_ci();
        let (out, threshold) = if root {
            (separate_fractional_exact(&gf, self.cov, ExactPolicy::Full, with_ci), 0.0)
        } else {
            match self.config.mode {
                Mode::IFvp | Mode::IFvpX => {
                    let eps = self.config.epsilon;
                    let policy = ExactPolicy::FirstFound { epsilon: eps };
                    (separate_fractional_exact(&gf, self.cov, policy, with_ci), eps)
                }
                _ => (separate_fractional_heuristic(&gf, self.cov, with_ci), 0.0),
            }
        };
        let out = if with_ci { out } else { out.without_ci() };
        (out, threshold)
    }

    /// Adds the outcome's cuts to the pool and LP; returns how many rows were new.
    fn add_cuts(&mut self, out: SeparationOutcome, node: &SearchNode, x: &[f64], y: &[f64], threshold: f64) -> usize {
        self.stats.separation_time += out.stats.elapsed;
        let mut rows = Vec::new();
        for cut in out.cuts {
            if self.config.audit || self.config.record_cuts {
                let violation = cut.violation_dense(self.inst, x, y);
                if self.config.audit {
                    self.stats.audit.checked += 1;
                    if violation <= threshold {
                        self.stats.audit.failures += 1;
                    }
                }
                if self.config.record_cuts {
                    self.emitted.push(EmittedCut {
                        cut: cut.clone(),
                        violation,
                        threshold,
                        node: node.id,
                    });
                }
            }
            let row = cut.to_lp_row(self.inst);
            if self.pool.insert(cut).is_some() {
                rows.push(row);
            } else {
                self.stats.duplicate_cuts += 1;
            }
        }
        let added = rows.len();
        if added > 0 {
            self.engine.add_rows(rows).expect("cut rows reference model columns");
            debug!("node {} cuts total={} pool={}", node.id, added, self.pool.len());
        }
        added
    }

    /// Builds a tour around the vertices the relaxation favours.
    fn round_lp(&mut self, y: &[f64]) {
        let seed = VertexSet::from_vertices(self.inst.n(), (0..y.len()).filter(|&v| y[v] >= 0.5));
        let tour = tour_from_seed(self.inst, self.cov, seed, &mut self.rng);
        self.offer_tour(tour);
    }

    fn finish(self, open_min: f64) -> SolveResult {
        let ub = self.upper();
        let exhausted = open_min.is_infinite();
        let lower_bound = match ub {
            Some(ub) if exhausted => ub as f64,
            Some(ub) => (open_min - BOUND_TOL).ceil().min(ub as f64).max(self.stats.root_bound.min(ub as f64)),
            None => open_min.max(self.stats.root_bound),
        };
        let status = match (ub, exhausted) {
            (Some(ub), _) if lower_bound >= ub as f64 => SolveStatus::Optimal,
            (Some(_), _) => SolveStatus::Feasible,
            (None, _) if self.timed_out() => SolveStatus::TimeoutNoIncumbent,
            (None, _) => SolveStatus::BoundOnly,
        };
        let mut stats = self.stats;
        stats.cuts = self.pool.counts();
        SolveResult {
            lower_bound,
            upper_bound: ub,
            gap: optimality_gap(lower_bound, ub),
            tour: self.incumbent.map(|(_, t)| t),
            status,
            stats,
            emitted: self.emitted,
        }
    }
}

/// Walks the single cycle of an integral support graph.
fn extract_tour(g: &SupportGraph) -> Vec<usize> {
    let start = g.vertices().first().expect("tour has vertices");
    let mut tour = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = g
            .neighbors(cur)
            .iter()
            .map(|&(u, _)| u)
            .find(|&u| u != prev)
            .expect("cycle vertices have degree 2");
        if next == start {
            break;
        }
        tour.push(next);
        prev = cur;
        cur = next;
    }
    tour
}
