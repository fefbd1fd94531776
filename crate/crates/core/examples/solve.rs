//! Solves a TSPLIB instance with the default mode and prints the tour.
//!
//! `cargo run --release --example solve -- crates/core/data/berlin52.tsp 7`

use std::time::Duration;

use covering_salesman::{parse_tsplib, solve, CoverageModel, SolverConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/toy20.tsp").into());
    let k: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);

    let inst = parse_tsplib(&std::fs::read_to_string(&path).expect("readable instance")).expect("TSPLIB file");
    let cov = CoverageModel::build(&inst, k).expect("valid k");
    let config = SolverConfig {
        time_limit: Duration::from_secs(60),
        ..SolverConfig::default()
    };
    let res = solve(&inst, &cov, &config).expect("solver run");

    println!("{} (n = {}, k = {k})", inst.name, inst.n());
    println!("status {}  LB {}  UB {:?}  gap {:.2}%", res.status.label(), res.lower_bound, res.upper_bound, res.gap);
    println!(
        "nodes {}  root bound {:.2}  cuts {:?}  time {:.2}s",
        res.stats.nodes,
        res.stats.root_bound,
        res.stats.cuts,
        res.stats.elapsed.as_secs_f64()
    );
    if let Some(tour) = res.tour {
        println!("tour ({} vertices): {tour:?}", tour.len());
    }
}
