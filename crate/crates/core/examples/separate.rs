//! Runs the three separation routines on hand-built support graphs.

use covering_salesman::separation::{
    separate_fractional_exact, separate_fractional_heuristic, separate_integer, ExactPolicy,
};
use covering_salesman::{CoverageModel, SupportGraph};

fn cycle(verts: &[usize], x: f64) -> Vec<(usize, usize, f64)> {
    (0..verts.len()).map(|p| (verts[p], verts[(p + 1) % verts.len()], x)).collect()
}

fn main() {
    let n = 8;
    let cov = CoverageModel::self_only(n);

    let mut edges = cycle(&[0, 1, 2, 3], 1.0);
    edges.extend(cycle(&[4, 5, 6, 7], 1.0));
    let integer = SupportGraph::from_edges(n, vec![1.0; n], edges);
    println!("integer point with two subcycles:");
    for cut in separate_integer(&integer, &cov, true).unwrap().cuts {
        println!("  {cut}  violation {:.2}", cut.violation(&integer));
    }

    let mut edges = cycle(&[0, 1, 2, 3], 1.0);
    edges.extend(cycle(&[4, 5, 6, 7], 0.5));
    edges.push((3, 4, 0.5));
    edges.push((0, 7, 0.5));
    let y = vec![1.0, 1.0, 1.0, 1.0, 0.75, 0.5, 0.5, 0.75];
    let frac = SupportGraph::from_edges(n, y, edges);
    for (label, out) in [
        ("exact, full", separate_fractional_exact(&frac, &cov, ExactPolicy::Full, true)),
        (
            "exact, first found (eps = 0.5)",
            separate_fractional_exact(&frac, &cov, ExactPolicy::FirstFound { epsilon: 0.5 }, true),
        ),
        ("heuristic", separate_fractional_heuristic(&frac, &cov, true)),
    ] {
        println!("{label}: {} cuts, {} min-cut calls", out.cuts.len(), out.stats.flow_calls);
        for cut in out.cuts.iter().take(5) {
            println!("  {cut}  violation {:.2}", cut.violation(&frac));
        }
    }
}
