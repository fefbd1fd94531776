//! Branch-and-cut solver for the covering salesman problem: find a shortest
//! cycle through a subset of vertices such that every vertex of the graph is
//! covered by some visited vertex.
//!
//! ```no_run
//! use covering_salesman::{solve, CoverageModel, Instance, Mode, SolverConfig};
//!
//! let inst = Instance::random("demo", 20, 100, 7);
//! let cov = CoverageModel::build(&inst, 3).unwrap();
//! let result = solve(&inst, &cov, &SolverConfig::with_mode(Mode::IFhX)).unwrap();
//! println!("{:?} {:?}", result.upper_bound, result.tour);
//! ```

pub mod bnc;
pub mod cli;
pub mod cuts;
pub mod flow;
pub mod heuristic;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod separation;
pub mod support;

pub use bnc::{solve, Mode, SolveResult, SolveStatus, SolverConfig};
pub use cuts::{Cut, CutKind};
pub use instance::{parse_tsplib, CoverageModel, Instance, VertexSet};
pub use support::SupportGraph;
