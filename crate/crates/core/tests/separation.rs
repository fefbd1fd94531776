use covering_salesman::cuts::{Cut, CutKind};
use covering_salesman::instance::{CoverageModel, Instance, VertexSet};
use covering_salesman::separation::{
    separate_fractional_exact, separate_fractional_heuristic, separate_integer, ExactPolicy, SeparationOutcome,
    MIN_VIOLATION,
};
use covering_salesman::support::SupportGraph;
use proptest::prelude::*;

fn vs(n: usize, v: &[usize]) -> VertexSet {
    VertexSet::from_vertices(n, v.iter().copied())
}

fn cycle_edges(cycle: &[usize], x: f64) -> Vec<(usize, usize, f64)> {
    (0..cycle.len())
        .map(|p| {
            let (a, b) = (cycle[p], cycle[(p + 1) % cycle.len()]);
            (a.min(b), a.max(b), x)
        })
        .collect()
}

fn has(out: &SeparationOutcome, kind: CutKind, set: &VertexSet) -> bool {
    out.cuts.iter().any(|c| c.kind() == kind && c.set() == set)
}

/// Nine vertices labelled 0..=8 standing for v1..v9. Subcycles {v4,v5,v6} and
/// {v1,v2,v3,v7}; C(v4)={v4,v8}, C(v5)={v5,v7}, C(v6)={v6,v9}.
fn two_subcycle_point() -> (SupportGraph, CoverageModel) {
    let n = 9;
    let mut sets: Vec<VertexSet> = (0..n).map(|v| VertexSet::singleton(n, v)).collect();
    sets[3] = vs(n, &[3, 7]);
    sets[4] = vs(n, &[4, 6]);
    sets[5] = vs(n, &[5, 8]);
    sets[6] = vs(n, &[6, 4]);
    sets[7] = vs(n, &[7, 3]);
    sets[8] = vs(n, &[8, 5]);
    let cov = CoverageModel::from_cover_sets(sets).unwrap();
    let mut edges = cycle_edges(&[3, 4, 5], 1.0);
    edges.extend(cycle_edges(&[0, 1, 2, 6], 1.0));
    let mut y = vec![0.0; n];
    for v in [0, 1, 2, 3, 4, 5, 6] {
        y[v] = 1.0;
    }
    (SupportGraph::from_edges(n, y, edges), cov)
}

#[test]
fn augmentation_through_a_visited_vertex_is_rejected() {
    let (g, cov) = two_subcycle_point();
    let out = separate_integer(&g, &cov, true).unwrap();
    let s = vs(9, &[3, 4, 5]);
    assert!(has(&out, CutKind::Vertex, &s));
    assert!(has(&out, CutKind::Gamma, &vs(9, &[3, 4, 5, 7])));
    assert!(has(&out, CutKind::Gamma, &vs(9, &[3, 4, 5, 8])));
    assert!(!out.cuts.iter().any(|c| c.set().contains(6) && c.set().contains(3)));
    assert!(has(&out, CutKind::Gamma, &vs(9, &[0, 1, 2, 6])));
    for cut in &out.cuts {
        assert!(cut.violation(&g) > 0.0, "{cut}");
    }
}

#[test]
fn every_subcycle_point_gets_a_cut() {
    for seed in 0..30u64 {
        let n = 9;
        let inst = Instance::random("s", n, 100, seed);
        let cov = CoverageModel::build(&inst, 1 + seed as usize % 3).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        order.rotate_left(seed as usize % n);
        let split = 3 + seed as usize % 3;
        let mut edges = cycle_edges(&order[..split], 1.0);
        edges.extend(cycle_edges(&order[split..], 1.0));
        let g = SupportGraph::from_edges(n, vec![1.0; n], edges);
        let out = separate_integer(&g, &cov, true).unwrap();
        assert!(!out.is_empty(), "seed {seed}");
    }
}

/// Component A = {0,1,2,3} integral, component B = {4,…,7} at one half.
fn split_fractional_point() -> SupportGraph {
    let mut edges = cycle_edges(&[0, 1, 2, 3], 1.0);
    edges.extend(cycle_edges(&[4, 5, 6, 7], 0.5));
    SupportGraph::from_edges(8, vec![1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5], edges)
}

#[test]
fn exact_separation_finds_the_empty_component_cut() {
    let g = split_fractional_point();
    let cov = CoverageModel::self_only(8);
    let out = separate_fractional_exact(&g, &cov, ExactPolicy::Full, false);
    let a = vs(8, &[0, 1, 2, 3]);
    let cut = out
        .cuts
        .iter()
        .find(|c| c.kind() == CutKind::Gamma && (c.set() == &a || c.set() == &a.complement()))
        .expect("component cut");
    assert!((cut.violation(&g) - 2.0).abs() < 1e-12);
}

#[test]
fn first_found_returns_a_single_cut_above_epsilon() {
    let g = split_fractional_point();
    let cov = CoverageModel::self_only(8);
    let out = separate_fractional_exact(&g, &cov, ExactPolicy::FirstFound { epsilon: 1.0 }, false);
    assert_eq!(out.cuts.len(), 1);
    assert!(out.cuts[0].violation(&g) > 1.0);
    let full = separate_fractional_exact(&g, &cov, ExactPolicy::Full, false);
    assert!(out.stats.flow_calls < full.stats.flow_calls);
}

#[test]
fn first_found_is_strict_at_epsilon() {
    // Every violated cut here has violation exactly 1.
    let n = 6;
    let cov = CoverageModel::self_only(n);
    let mut edges = cycle_edges(&[0, 1, 2], 1.0);
    edges.extend(cycle_edges(&[3, 4, 5], 1.0));
    edges.push((2, 3, 0.5));
    edges.push((0, 5, 0.5));
    let g = SupportGraph::from_edges(n, vec![1.0; n], edges);
    let full = separate_fractional_exact(&g, &cov, ExactPolicy::Full, false);
    assert!(!full.is_empty());
    assert!(full.cuts.iter().all(|c| (c.violation(&g) - 1.0).abs() < 1e-12));
    assert!(separate_fractional_exact(&g, &cov, ExactPolicy::FirstFound { epsilon: 1.0 }, false).is_empty());
}

#[test]
fn heuristic_cuts_an_isolated_cover_set() {
    let n = 8;
    let mut sets: Vec<VertexSet> = (0..n).map(|v| VertexSet::singleton(n, v)).collect();
    sets[0] = vs(n, &[0, 1, 2]);
    let cov = CoverageModel::from_cover_sets(sets).unwrap();
    let mut edges = cycle_edges(&[0, 1, 2], 1.0);
    edges.extend(cycle_edges(&[3, 4, 5, 6, 7], 1.0));
    let g = SupportGraph::from_edges(n, vec![1.0; n], edges);
    let out = separate_fractional_heuristic(&g, &cov, false);
    let cut = out.cuts.iter().find(|c| c.kind() == CutKind::Gamma && c.set() == &vs(n, &[0, 1, 2])).unwrap();
    assert!((cut.violation(&g) - 2.0).abs() < 1e-12);
}

#[test]
fn heuristic_links_components_with_unit_vertices() {
    let n = 6;
    let cov = CoverageModel::everything(n);
    let mut edges = cycle_edges(&[0, 1, 2], 1.0);
    edges.extend(cycle_edges(&[3, 4, 5], 1.0));
    let g = SupportGraph::from_edges(n, vec![1.0; n], edges);
    let out = separate_fractional_heuristic(&g, &cov, true);
    let link = out.cuts.iter().find(|c| c.kind() == CutKind::Link).unwrap();
    assert!((link.violation(&g) - 2.0).abs() < 1e-12);
}

#[test]
fn connected_tour_gives_nothing_to_either_routine() {
    let n = 7;
    let g = SupportGraph::from_edges(n, vec![1.0; n], cycle_edges(&[0, 3, 1, 5, 2, 6, 4], 1.0));
    let inst = Instance::random("c", n, 100, 9);
    let cov = CoverageModel::build(&inst, 2).unwrap();
    assert!(separate_fractional_exact(&g, &cov, ExactPolicy::Full, true).is_empty());
    assert!(separate_fractional_heuristic(&g, &cov, true).is_empty());
}

/// Random fractional support on `n` vertices.
fn random_support(n: usize, ys: &[u8], xs: &[u8]) -> SupportGraph {
    let y: Vec<f64> = (0..n).map(|v| ys[v % ys.len()] as f64 / 4.0).collect();
    let mut edges = Vec::new();
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            let q = xs[idx % xs.len()];
            idx += 1;
            if q > 0 && y[i] > 0.0 && y[j] > 0.0 {
                edges.push((i, j, q as f64 / 4.0));
            }
        }
    }
    SupportGraph::from_edges(n, y, edges)
}

fn coverage(n: usize, seed: u64, k: usize) -> CoverageModel {
    CoverageModel::build(&Instance::random("s", n, 100, seed), k.min(n - 1)).unwrap()
}

/// Largest violation of any link row anchored at `i` and `j`, by enumeration of `S`.
fn best_link_violation(g: &SupportGraph, i: usize, j: usize) -> f64 {
    let n = g.n();
    let mut best = f64::NEG_INFINITY;
    for m in 0u32..(1 << n) {
        let s = VertexSet::from_vertices(n, (0..n).filter(|&v| m & (1 << v) != 0));
        if s.contains(i) && !s.contains(j) {
            best = best.max(2.0 * (g.y(i) + g.y(j) - 1.0) - g.cut_weight(&s));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn exact_link_separation_is_optimal_per_pair(
        n in 4usize..=8,
        ys in prop::collection::vec(1u8..=4, 8),
        xs in prop::collection::vec(0u8..=4, 28),
        seed in any::<u64>(),
        k in 1usize..=3,
    ) {
        let g = random_support(n, &ys, &xs);
        let cov = coverage(n, seed, k);
        let out = separate_fractional_exact(&g, &cov, ExactPolicy::Full, true);
        for i in 0..n {
            for j in i + 1..n {
                let best = best_link_violation(&g, i, j);
                let found = out.cuts.iter()
                    .filter(|c| c.kind() == CutKind::Link)
                    .filter(|c| { let mut a = c.anchors().to_vec(); a.sort(); a == [i, j] })
                    .map(|c| c.violation(&g))
                    .fold(f64::NEG_INFINITY, f64::max);
                if best > MIN_VIOLATION {
                    prop_assert!((found - best).abs() < 1e-9, "pair ({i},{j}): found {found}, best {best}");
                } else {
                    prop_assert!(found == f64::NEG_INFINITY);
                }
            }
        }
    }

    #[test]
    fn every_returned_cut_is_violated(
        n in 4usize..=9,
        ys in prop::collection::vec(1u8..=4, 9),
        xs in prop::collection::vec(0u8..=4, 36),
        seed in any::<u64>(),
        k in 1usize..=3,
        with_ci in any::<bool>(),
    ) {
        let g = random_support(n, &ys, &xs);
        let cov = coverage(n, seed, k);
        for cut in separate_fractional_exact(&g, &cov, ExactPolicy::Full, with_ci).cuts {
            prop_assert!(cut.violation(&g) > MIN_VIOLATION);
            prop_assert!(with_ci || cut.kind() != CutKind::CoverIntersection);
        }
        let ff = separate_fractional_exact(&g, &cov, ExactPolicy::FirstFound { epsilon: 1.0 }, with_ci);
        prop_assert!(ff.cuts.len() <= 1);
        for cut in ff.cuts {
            prop_assert!(cut.violation(&g) > 1.0);
        }
        for cut in separate_fractional_heuristic(&g, &cov, with_ci).cuts {
            prop_assert!(cut.violation(&g) > 0.0);
        }
    }

    #[test]
    fn heuristic_cuts_are_matched_by_exact_separation(
        n in 4usize..=8,
        ys in prop::collection::vec(1u8..=4, 8),
        xs in prop::collection::vec(0u8..=4, 28),
        seed in any::<u64>(),
        k in 1usize..=3,
    ) {
        let g = random_support(n, &ys, &xs);
        let cov = coverage(n, seed, k);
        let exact = separate_fractional_exact(&g, &cov, ExactPolicy::Full, true);
        let best_of = |kind: CutKind| exact.cuts.iter()
            .filter(|c| c.kind() == kind)
            .map(|c| c.violation(&g))
            .fold(f64::NEG_INFINITY, f64::max);
        for cut in separate_fractional_heuristic(&g, &cov, true).cuts {
            let v = cut.violation(&g);
            if cut.kind() == CutKind::Link {
                let [i, j] = [cut.anchors()[0], cut.anchors()[1]];
                prop_assert!(best_link_violation(&g, i, j) >= v - 1e-9);
            }
            prop_assert!(best_of(cut.kind()) >= v - 1e-9, "{} (violation {v}) not matched", cut);
        }
    }
}

#[test]
fn integer_cuts_hold_for_all_feasible_tours() {
    use covering_salesman::oracle::enumerate_feasible_tours;
    for seed in 0..20u64 {
        let n = 8;
        let inst = Instance::random("t", n, 100, seed);
        let cov = CoverageModel::build(&inst, 2).unwrap();
        let tours = enumerate_feasible_tours(&inst, &cov).unwrap();
        let mut order: Vec<usize> = (0..n).collect();
        order.rotate_left(seed as usize % n);
        let mut edges = cycle_edges(&order[..3], 1.0);
        edges.extend(cycle_edges(&order[3..6], 1.0));
        let mut y = vec![0.0; n];
        for &v in &order[..6] {
            y[v] = 1.0;
        }
        let g = SupportGraph::from_edges(n, y, edges);
        let cuts: Vec<Cut> = separate_integer(&g, &cov, true).unwrap().cuts;
        for cut in &cuts {
            for t in &tours {
                assert!(cut.holds_for_tour(n, t), "seed {seed}: {cut} cuts off {t:?}");
            }
        }
    }
}
