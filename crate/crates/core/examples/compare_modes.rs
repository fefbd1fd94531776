//! Solves one random instance under every separation mode and tabulates the
//! bounds, node counts and cut mix.

use std::time::Duration;

use covering_salesman::bnc::root_relaxation;
use covering_salesman::{solve, CoverageModel, Instance, Mode, SolverConfig};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(40);
    let inst = Instance::random("compare", n, 100, 7);
    let cov = CoverageModel::build(&inst, 5).unwrap();

    println!("{:<14} {:>10} {:>8} {:>8} {:>7} {:>7} {:>7} {:>7} {:>7}", "mode", "root", "UB", "nodes", "gamma", "vertex", "link", "ci", "time");
    for mode in Mode::ALL {
        let config = SolverConfig {
            time_limit: Duration::from_secs(30),
            ..SolverConfig::with_mode(mode)
        };
        let root = root_relaxation(&inst, &cov, &config).unwrap().root_bound;
        let res = solve(&inst, &cov, &config).unwrap();
        let c = res.stats.cuts;
        println!(
            "{:<14} {:>10.2} {:>8} {:>8} {:>7} {:>7} {:>7} {:>7} {:>6.2}s",
            mode.label(),
            root,
            res.upper_bound.map_or("-".into(), |v| v.to_string()),
            res.stats.nodes,
            c.gamma,
            c.vertex,
            c.link,
            c.ci,
            res.stats.elapsed.as_secs_f64()
        );
    }
}
