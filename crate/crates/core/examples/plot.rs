//! Solves a bundled instance and writes an SVG of the tour and its covering
//! circles to the given path (default `tour.svg`).

use covering_salesman::cli::{render_svg, RunReport};
use covering_salesman::{parse_tsplib, solve, CoverageModel, Mode, SolverConfig};

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "tour.svg".into());
    let text = include_str!("../data/toy20.tsp");
    let inst = parse_tsplib(text).unwrap();
    let k = 3;
    let cov = CoverageModel::build(&inst, k).unwrap();
    let res = solve(&inst, &cov, &SolverConfig::with_mode(Mode::IFhX)).unwrap();
    let report = RunReport::new(&inst.name, k, Mode::IFhX, &res);
    std::fs::write(&out, render_svg(&inst, &report).unwrap()).unwrap();
    println!("{} vertices, tour of {} written to {out}", inst.n(), report.tour.map_or(0, |t| t.len()));
}
