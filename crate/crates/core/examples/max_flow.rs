//! Minimum cut between two covering sets of a fractional support graph, with
//! and without the overlap-splitting construction used for CI cuts.

use covering_salesman::flow::{augment_for_ci, build_cut_network, max_flow_min_cut};
use covering_salesman::{SupportGraph, VertexSet};

fn main() {
    let n = 6;
    let edges = vec![(0, 1, 1.0), (1, 2, 0.5), (2, 3, 0.5), (3, 4, 1.0), (4, 5, 0.5), (5, 0, 0.5), (1, 4, 1.0)];
    let g = SupportGraph::from_edges(n, vec![1.0; n], edges);

    let a = VertexSet::from_vertices(n, [0, 1]);
    let b = VertexSet::from_vertices(n, [3, 4]);
    let net = build_cut_network(&g, &a, &b).unwrap();
    let cut = max_flow_min_cut(&net);
    println!("min cut {a} | {b}: weight {:.2}, source side {}", cut.weight(), cut.source_side);

    let cv = VertexSet::from_vertices(n, [0, 1, 2]);
    let cu = VertexSet::from_vertices(n, [2, 3]);
    let aug = augment_for_ci(&g, &cv, &cu).unwrap();
    let cut = max_flow_min_cut(&aug);
    println!(
        "overlapping {cv} | {cu}: {} nodes, weight {:.2}, source side {}",
        aug.node_count(),
        cut.weight(),
        cut.source_side
    );
}
