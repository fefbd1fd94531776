//! Builds covering sets for a small random instance and prints them.
//!
//! `cargo run --example coverage -- 10 3`

use covering_salesman::{CoverageModel, Instance};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    let k: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let inst = Instance::random("demo", n, 100, 42);
    let cov = CoverageModel::build(&inst, k).expect("k within 1..n");

    for v in 0..n {
        println!("C({v}) = {}   D({v}) = {}", cov.cover_of(v), cov.covers(v));
    }
    let first_three = covering_salesman::VertexSet::from_vertices(n, [0, 1, 2]);
    println!(
        "{{0, 1, 2}}: in gamma = {}, covers everything = {}",
        cov.in_gamma(&first_three),
        cov.covers_all(&first_three)
    );
}
