//! Upper bounds: greedy set cover followed by tour construction and local search.

use rand::Rng;

use crate::instance::{CoverageModel, Instance, VertexSet};

/// Greedy cover, nearest-neighbour tour, then 2-opt and vertex drop/swap moves.
///
/// With `noise > 0` the greedy scores are perturbed multiplicatively by up to
/// `±noise`, which makes repeated calls explore different covers.
pub fn primal_heuristic(inst: &Instance, cov: &CoverageModel, rng: &mut impl Rng, noise: f64) -> Vec<usize> {
    let start = VertexSet::empty(inst.n());
    let set = greedy_cover(inst, cov, start, rng, noise);
    improve(inst, cov, tour_through(inst, &set))
}

/// Completes `set` into a cover, builds a tour on it and improves it.
pub fn tour_from_seed(inst: &Instance, cov: &CoverageModel, seed: VertexSet, rng: &mut impl Rng) -> Vec<usize> {
    let set = greedy_cover(inst, cov, seed, rng, 0.0);
    improve(inst, cov, tour_through(inst, &set))
}

/// Adds vertices to `set` until it covers every vertex and has at least three
/// members. Each step picks the vertex with the best ratio of newly covered
/// vertices to its distance from the current selection.
pub fn greedy_cover(
    inst: &Instance,
    cov: &CoverageModel,
    mut set: VertexSet,
    rng: &mut impl Rng,
    noise: f64,
) -> VertexSet {
    let n = inst.n();
    let mut uncovered: VertexSet = VertexSet::full(n).difference(&cov.covered_union(&set));
    while !uncovered.is_empty() {
        let mut best: Option<(f64, usize)> = None;
        for w in (0..n).filter(|&w| !set.contains(w)) {
            let gain = cov.covers(w).intersection(&uncovered).len();
            if gain == 0 {
                continue;
            }
            let dist = set.iter().map(|s| inst.cost(w, s)).min().unwrap_or(0);
            let mut score = gain as f64 / (dist as f64 + 1.0);
            if noise > 0.0 {
                score *= 1.0 + rng.gen_range(-noise..=noise);
            }
            if best.map_or(true, |(b, _)| score > b) {
                best = Some((score, w));
            }
        }
        let (_, w) = best.expect("an uncovered vertex is always coverable by itself");
        set.insert(w);
        uncovered = uncovered.difference(cov.covers(w));
    }
    while set.len() < 3.min(n) {
        let w = (0..n)
            .filter(|&w| !set.contains(w))
            .min_by_key(|&w| (set.iter().map(|s| inst.cost(w, s)).min().unwrap_or(0), w))
            .expect("fewer than n vertices selected");
        set.insert(w);
    }
    set
}

/// Nearest-neighbour tour over `set`, started at its smallest member.
pub fn tour_through(inst: &Instance, set: &VertexSet) -> Vec<usize> {
    let mut left: Vec<usize> = set.iter().collect();
    let mut tour = vec![left.remove(0)];
    while !left.is_empty() {
        let last = *tour.last().unwrap();
        let (pos, _) = left
            .iter()
            .enumerate()
            .min_by_key(|&(_, &v)| (inst.cost(last, v), v))
            .unwrap();
        tour.push(left.remove(pos));
    }
    tour
}

/// 2-opt to local optimality.
pub fn two_opt(inst: &Instance, tour: &mut [usize]) {
    let m = tour.len();
    if m < 4 {
        return;
    }
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..m - 1 {
            for j in i + 2..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                let (a, b) = (tour[i], tour[i + 1]);
                let (c, d) = (tour[j], tour[(j + 1) % m]);
                let delta = inst.cost(a, c) + inst.cost(b, d) - inst.cost(a, b) - inst.cost(c, d);
                if delta < 0 {
                    tour[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
    }
}

fn removal_saving(inst: &Instance, tour: &[usize], p: usize) -> i64 {
    let m = tour.len();
    let (a, v, b) = (tour[(p + m - 1) % m], tour[p], tour[(p + 1) % m]);
    inst.cost(a, v) + inst.cost(v, b) - inst.cost(a, b)
}

fn cheapest_insertion(inst: &Instance, tour: &[usize], w: usize) -> (i64, usize) {
    let m = tour.len();
    (0..m)
        .map(|p| {
            let (a, b) = (tour[p], tour[(p + 1) % m]);
            (inst.cost(a, w) + inst.cost(w, b) - inst.cost(a, b), p + 1)
        })
        .min()
        .expect("tour is non-empty")
}

/// Local search: 2-opt, dropping vertices whose removal keeps the tour covering,
/// and swapping a tour vertex for an outside one when that shortens the tour.
pub fn improve(inst: &Instance, cov: &CoverageModel, mut tour: Vec<usize>) -> Vec<usize> {
    let n = inst.n();
    loop {
        two_opt(inst, &mut tour);
        let members = VertexSet::from_vertices(n, tour.iter().copied());

        if tour.len() > 3 {
            let mut order: Vec<usize> = (0..tour.len()).collect();
            order.sort_by_key(|&p| (-removal_saving(inst, &tour, p), tour[p]));
            let drop = order.into_iter().find(|&p| {
                let mut rest = members.clone();
                rest.remove(tour[p]);
                removal_saving(inst, &tour, p) >= 0 && cov.is_cover(&rest)
            });
            if let Some(p) = drop {
                tour.remove(p);
                continue;
            }
        }

        let mut best: Option<(i64, usize, usize, usize)> = None;
        for p in 0..tour.len() {
            let saving = removal_saving(inst, &tour, p);
            let mut rest = members.clone();
            rest.remove(tour[p]);
            let mut reduced = tour.clone();
            reduced.remove(p);
            for w in (0..n).filter(|&w| !members.contains(w)) {
                let mut with_w = rest.clone();
                with_w.insert(w);
                let (added, pos) = cheapest_insertion(inst, &reduced, w);
                let delta = added - saving;
                if delta < 0 && best.map_or(true, |(b, ..)| delta < b) && cov.is_cover(&with_w) {
                    best = Some((delta, p, w, pos));
                }
            }
        }
        match best {
            Some((_, p, w, pos)) => {
                tour.remove(p);
                tour.insert(pos, w);
            }
            None => return tour,
        }
    }
}
