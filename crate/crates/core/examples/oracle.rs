//! Cross-checks the branch-and-cut solver against exhaustive search on small
//! random instances.

use covering_salesman::oracle::{brute_force_optimum, enumerate_feasible_tours};
use covering_salesman::{solve, CoverageModel, Instance, SolverConfig};

fn main() {
    for seed in 0..8 {
        let n = 6 + seed as usize % 5;
        let inst = Instance::random("check", n, 100, seed);
        let cov = CoverageModel::build(&inst, 2).unwrap();
        let oracle = brute_force_optimum(&inst, &cov).unwrap();
        let tours = enumerate_feasible_tours(&inst, &cov).unwrap().len();
        let bnc = solve(&inst, &cov, &SolverConfig::default()).unwrap();
        println!(
            "n = {n:2}  feasible tours {tours:6}  oracle {:?}  branch-and-cut {:?}  {}",
            oracle.value(),
            bnc.value(),
            if oracle.value() == bnc.value() { "ok" } else { "MISMATCH" }
        );
    }
}
