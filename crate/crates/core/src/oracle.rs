//! Exhaustive reference procedures for small inputs.

use std::time::Instant;

use thiserror::Error;

use crate::bnc::SolveResult;
use crate::flow::{FlowNetwork, MinCutResult};
use crate::instance::{CoverageModel, Instance, VertexSet};

/// Vertex cap for the exact optimum.
pub const OPTIMUM_CAP: usize = 12;
/// Vertex cap for tour enumeration.
pub const ENUMERATION_CAP: usize = 10;
/// Cap on non-terminal nodes for exhaustive min cut.
pub const MIN_CUT_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimit {
    pub max_n: usize,
}

impl OracleLimit {
    pub fn check(self, n: usize) -> Result<(), OracleError> {
        if n > self.max_n {
            Err(OracleError::TooLarge { n, cap: self.max_n })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("input of size {n} exceeds the oracle cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("no covering vertex set of size at least 3 exists")]
    Infeasible,
}

/// Optimum over every covering subset with at least three vertices.
///
/// One Held–Karp table is shared by all subsets: `dp[mask][j]` is the cheapest
/// path that starts at the smallest vertex of `mask`, visits exactly `mask` and
/// ends at `j`.
pub fn brute_force_optimum(inst: &Instance, cov: &CoverageModel) -> Result<SolveResult, OracleError> {
    brute_force_optimum_with(inst, cov, OracleLimit { max_n: OPTIMUM_CAP })
}

pub fn brute_force_optimum_with(
    inst: &Instance,
    cov: &CoverageModel,
    limit: OracleLimit,
) -> Result<SolveResult, OracleError> {
    let start = Instant::now();
    let n = inst.n();
    limit.check(n)?;
    if n < 3 {
        return Err(OracleError::Infeasible);
    }
    let full = 1usize << n;
    const UNSET: i64 = i64::MAX;
    let mut dp = vec![UNSET; full * n];
    let mut parent = vec![u8::MAX; full * n];
    for s in 0..n {
        dp[(1 << s) * n + s] = 0;
    }
    for mask in 1..full {
        let s = mask.trailing_zeros() as usize;
        for j in 0..n {
            let here = dp[mask * n + j];
            if here == UNSET {
                continue;
            }
            for k in s + 1..n {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let cand = here + inst.cost(j, k);
                if cand < dp[next * n + k] {
                    dp[next * n + k] = cand;
                    parent[next * n + k] = j as u8;
                }
            }
        }
    }

    let mut best: Option<(i64, usize, usize)> = None;
    for mask in 1..full {
        if mask.count_ones() < 3 {
            continue;
        }
        let set = VertexSet::from_vertices(n, (0..n).filter(|&v| mask & (1 << v) != 0));
        if !cov.is_cover(&set) {
            continue;
        }
        let s = mask.trailing_zeros() as usize;
        for j in 0..n {
            let here = dp[mask * n + j];
            if j == s || here == UNSET {
                continue;
            }
            let total = here + inst.cost(j, s);
            if best.map_or(true, |(b, _, _)| total < b) {
                best = Some((total, mask, j));
            }
        }
    }
    let (value, mask, last) = best.ok_or(OracleError::Infeasible)?;
    let mut tour = Vec::new();
    let (mut m, mut j) = (mask, last);
    loop {
        tour.push(j);
        let p = parent[m * n + j];
        if p == u8::MAX {
            break;
        }
        m &= !(1 << j);
        j = p as usize;
    }
    tour.reverse();
    let tour = canonical_tour(&tour);
    Ok(SolveResult::exact(value, tour, start.elapsed()))
}

/// Rotates to the smallest vertex and picks the direction whose second vertex is smaller.
pub fn canonical_tour(tour: &[usize]) -> Vec<usize> {
    let m = tour.len();
    if m == 0 {
        return Vec::new();
    }
    let pos = (0..m).min_by_key(|&p| tour[p]).unwrap();
    let fwd: Vec<usize> = (0..m).map(|k| tour[(pos + k) % m]).collect();
    let bwd: Vec<usize> = (0..m).map(|k| tour[(pos + m - k) % m]).collect();
    if fwd <= bwd {
        fwd
    } else {
        bwd
    }
}

/// Calls `f` once for every distinct cycle through every covering subset with at
/// least three vertices. Cycles arrive in canonical form.
pub fn for_each_feasible_tour(
    inst: &Instance,
    cov: &CoverageModel,
    mut f: impl FnMut(&[usize]),
) -> Result<(), OracleError> {
    let n = inst.n();
    OracleLimit { max_n: ENUMERATION_CAP }.check(n)?;
    for mask in 1usize..(1 << n) {
        if mask.count_ones() < 3 {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
        if !cov.is_cover(&VertexSet::from_vertices(n, members.iter().copied())) {
            continue;
        }
        let mut rest = members[1..].to_vec();
        let mut tour = Vec::with_capacity(members.len());
        permute(&mut rest, 0, &mut |perm| {
            if perm[0] < perm[perm.len() - 1] {
                tour.clear();
                tour.push(members[0]);
                tour.extend_from_slice(perm);
                f(&tour);
            }
        });
    }
    Ok(())
}

fn permute(items: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Collects [`for_each_feasible_tour`].
pub fn enumerate_feasible_tours(inst: &Instance, cov: &CoverageModel) -> Result<Vec<Vec<usize>>, OracleError> {
    let mut out = Vec::new();
    for_each_feasible_tour(inst, cov, |t| out.push(t.to_vec()))?;
    Ok(out)
}

/// Edge and vertex incidence vectors of a tour.
pub fn tour_incidence(inst: &Instance, tour: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; inst.edge_count()];
    let mut y = vec![0.0; inst.n()];
    for (p, &v) in tour.iter().enumerate() {
        y[v] = 1.0;
        x[inst.edge_index(v, tour[(p + 1) % tour.len()])] = 1.0;
    }
    (x, y)
}

/// Minimum cut by trying every source-side subset of the non-terminal nodes.
pub fn brute_force_min_cut(net: &FlowNetwork) -> Result<MinCutResult, OracleError> {
    let (s, t) = (net.source(), net.sink());
    let free: Vec<usize> = (0..net.node_count()).filter(|&v| v != s && v != t).collect();
    OracleLimit { max_n: MIN_CUT_CAP }.check(free.len())?;
    let mut best: Option<(i64, Vec<bool>)> = None;
    let mut side = vec![false; net.node_count()];
    for mask in 0usize..(1 << free.len()) {
        side.iter_mut().for_each(|b| *b = false);
        side[s] = true;
        for (bit, &v) in free.iter().enumerate() {
            side[v] = mask & (1 << bit) != 0;
        }
        let value = net.cut_capacity(&side);
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, side.clone()));
        }
    }
    let (value, source_nodes) = best.expect("at least one cut exists");
    let real = net.real_count();
    Ok(MinCutResult {
        value,
        source_side: VertexSet::from_vertices(real, (0..real).filter(|&v| source_nodes[v])),
        source_nodes,
        infinite: value >= net.infinity(),
    })
}
