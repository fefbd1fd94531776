//! Command-line front end behind the `csp` binary.
//!
//! Exit codes: 0 when a tour was found, 2 when only a bound is available (or a
//! plot is requested for a report without a tour), 1 for usage and input errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bnc::{optimality_gap, solve, Mode, SolveResult, SolveStatus, SolverConfig};
use crate::cuts::CutCounts;
use crate::instance::{parse_tsplib, CoverageModel, Instance};

/// One solver run, as written to JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub instance: String,
    pub k: usize,
    pub mode: String,
    pub lb: f64,
    pub ub: Option<i64>,
    pub gap_percent: f64,
    pub time_s: f64,
    pub nodes: usize,
    pub cuts: CutCounts,
    /// 1-based vertex ids.
    pub tour: Option<Vec<usize>>,
    pub status: String,
}

pub fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

impl RunReport {
    pub fn new(instance: &str, k: usize, mode: Mode, result: &SolveResult) -> Self {
        RunReport {
            instance: instance.to_string(),
            k,
            mode: mode.flag().to_string(),
            lb: result.lower_bound,
            ub: result.upper_bound,
            gap_percent: round2(optimality_gap(result.lower_bound, result.upper_bound)),
            time_s: result.stats.elapsed.as_secs_f64(),
            nodes: result.stats.nodes,
            cuts: result.stats.cuts,
            tour: result.tour.as_ref().map(|t| t.iter().map(|v| v + 1).collect()),
            status: result.status.label().to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.tour.is_some() {
            0
        } else {
            2
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "csp", about = "Covering salesman branch-and-cut solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and write a JSON report.
    Solve(SolveArgs),
    /// Solve every instance in a directory for each k and mode.
    Bench(BenchArgs),
    /// Render a report's tour as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "IFhX")]
    pub mode: Mode,
    #[arg(long, default_value_t = 3600.0)]
    pub time_limit: f64,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = vec![7, 9, 11])]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = Mode::ALL.to_vec())]
    pub modes: Vec<Mode>,
    #[arg(long, default_value_t = 3600.0)]
    pub time_limit: f64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON array destination; the text table always goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Error carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("CSP_LOG", "off");
    let _ = env_logger::Builder::from_env(env).format_timestamp_millis().try_init();
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(&a).map(|r| r.exit_code()),
        Command::Bench(a) => cmd_bench(&a).map(|_| 0),
        Command::Plot(a) => cmd_plot(&a).map(|_| 0),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn load_instance(path: &Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    parse_tsplib(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn seconds(v: f64) -> Result<Duration, CliError> {
    Duration::try_from_secs_f64(v)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| CliError::usage(format!("time limit must be positive, got {v}")))
}

fn write_json(path: Option<&Path>, json: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, format!("{json}\n"))
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

pub fn solve_instance(inst: &Instance, k: usize, config: &SolverConfig) -> Result<RunReport, CliError> {
    let cov = CoverageModel::build(inst, k).map_err(|e| CliError::usage(e.to_string()))?;
    let result = solve(inst, &cov, config).map_err(|e| CliError {
        code: 1,
        message: e.to_string(),
    })?;
    Ok(RunReport::new(&inst.name, k, config.mode, &result))
}

pub fn cmd_solve(args: &SolveArgs) -> Result<RunReport, CliError> {
    if args.epsilon < 0.0 {
        return Err(CliError::usage("epsilon must be non-negative"));
    }
    let inst = load_instance(&args.instance)?;
    let config = SolverConfig {
        mode: args.mode,
        epsilon: args.epsilon,
        time_limit: seconds(args.time_limit)?,
        seed: args.seed,
        ..SolverConfig::default()
    };
    let report = solve_instance(&inst, args.k, &config)?;
    let json = serde_json::to_string_pretty(&report).expect("reports serialize");
    write_json(args.out.as_deref(), &json)?;
    if let (Some(svg), Some(_)) = (&args.svg, &report.tour) {
        let doc = render_svg(&inst, &report)?;
        std::fs::write(svg, doc).map_err(|e| CliError::usage(format!("cannot write {}: {e}", svg.display())))?;
    }
    Ok(report)
}

/// Runs the cross product of instances, `k` values and modes. Reports come back
/// ordered by (instance, k, mode).
pub fn cmd_bench(args: &BenchArgs) -> Result<Vec<RunReport>, CliError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.dir)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", args.dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "tsp"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::usage(format!("no .tsp files in {}", args.dir.display())));
    }
    let instances = paths.iter().map(|p| load_instance(p)).collect::<Result<Vec<_>, _>>()?;
    let limit = seconds(args.time_limit)?;
    let mut tasks = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        for &k in &args.k {
            for &mode in &args.modes {
                tasks.push((i, inst, k, mode));
            }
        }
    }
    tasks.sort_by(|a, b| (&a.1.name, a.0, a.2, a.3).cmp(&(&b.1.name, b.0, b.2, b.3)));

    let queue = Mutex::new(tasks.iter().enumerate());
    let results = Mutex::new((0..tasks.len()).map(|_| None).collect::<Vec<_>>());
    std::thread::scope(|scope| {
        for _ in 0..args.jobs.max(1) {
            scope.spawn(|| loop {
                let next = queue.lock().unwrap().next();
                let Some((slot, &(_, inst, k, mode))) = next else { break };
                let config = SolverConfig {
                    mode,
                    time_limit: limit,
                    seed: args.seed,
                    ..SolverConfig::default()
                };
                let report = solve_instance(inst, k, &config);
                results.lock().unwrap()[slot] = Some(report);
            });
        }
    });
    let reports = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every task ran"))
        .collect::<Result<Vec<_>, _>>()?;
    let json = serde_json::to_string_pretty(&reports).expect("reports serialize");
    if let Some(out) = &args.out {
        write_json(Some(out), &json)?;
    }
    print!("{}", bench_table(&reports));
    Ok(reports)
}

/// Per-mode averages of gap, time and nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeAverage {
    pub mode: String,
    pub gap_percent: f64,
    pub time_s: f64,
    pub nodes: f64,
}

pub fn mode_averages(reports: &[RunReport]) -> Vec<ModeAverage> {
    let mut modes: Vec<&str> = reports.iter().map(|r| r.mode.as_str()).collect();
    modes.sort_by_key(|m| m.parse::<Mode>().ok());
    modes.dedup();
    modes
        .into_iter()
        .map(|mode| {
            let rows: Vec<&RunReport> = reports.iter().filter(|r| r.mode == mode).collect();
            let mean = |f: &dyn Fn(&RunReport) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / rows.len() as f64;
            ModeAverage {
                mode: mode.to_string(),
                gap_percent: mean(&|r| r.gap_percent),
                time_s: mean(&|r| r.time_s),
                nodes: mean(&|r| r.nodes as f64),
            }
        })
        .collect()
}

pub fn bench_table(reports: &[RunReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:>3} {:<6} {:>12} {:>10} {:>7} {:>10} {:>8}",
        "instance", "k", "mode", "LB", "UB", "gap%", "time_s", "nodes"
    );
    for r in reports {
        let ub = r.ub.map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(
            out,
            "{:<14} {:>3} {:<6} {:>12.2} {:>10} {:>7.2} {:>10.2} {:>8}",
            r.instance, r.k, r.mode, r.lb, ub, r.gap_percent, r.time_s, r.nodes
        );
    }
    for avg in mode_averages(reports) {
        let _ = writeln!(
            out,
            "{:<14} {:>3} {:<6} {:>12} {:>10} {:>7.2} {:>10.2} {:>8.1}",
            "Avg", "", avg.mode, "", "", avg.gap_percent, avg.time_s, avg.nodes
        );
    }
    out
}

pub fn cmd_plot(args: &PlotArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.report)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", args.report.display())))?;
    let report: RunReport =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", args.report.display())))?;
    let inst = load_instance(&args.instance)?;
    let doc = render_svg(&inst, &report)?;
    std::fs::write(&args.out, doc).map_err(|e| CliError::usage(format!("cannot write {}: {e}", args.out.display())))
}

/// SVG drawing of the instance: every vertex as a dot, the tour as a closed path,
/// and around each tour vertex a circle through its k-th nearest neighbour.
pub fn render_svg(inst: &Instance, report: &RunReport) -> Result<String, CliError> {
    let tour = report.tour.as_ref().ok_or(CliError {
        code: 2,
        message: "report has no tour".into(),
    })?;
    if tour.iter().any(|&v| v == 0 || v > inst.n()) {
        return Err(CliError::usage("tour references a vertex outside the instance"));
    }
    let cov = CoverageModel::build(inst, report.k).map_err(|e| CliError::usage(e.to_string()))?;
    let pts = inst.points();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in pts {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1.0);
    let size = 800.0;
    let margin = 40.0;
    let scale = (size - 2.0 * margin) / span;
    let sx = |x: f64| margin + (x - x0) * scale;
    let sy = |y: f64| size - margin - (y - y0) * scale;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(
        svg,
        r#"<title>{} k={} mode={} ub={}</title>"#,
        report.instance,
        report.k,
        report.mode,
        report.ub.map_or("-".into(), |v| v.to_string())
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for &id in tour {
        let v = id - 1;
        let radius = cov
            .cover_of(v)
            .iter()
            .map(|u| pts[v].dist(&pts[u]))
            .fold(0.0, f64::max);
        let _ = writeln!(
            svg,
            r##"<circle class="cover" cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="#9db8d9" stroke-width="1"/>"##,
            sx(pts[v].x),
            sy(pts[v].y),
            radius * scale
        );
    }
    let mut d = String::new();
    for (idx, &id) in tour.iter().enumerate() {
        let p = pts[id - 1];
        let _ = write!(d, "{}{:.2} {:.2} ", if idx == 0 { "M" } else { "L" }, sx(p.x), sy(p.y));
    }
    d.push('Z');
    let _ = writeln!(
        svg,
        r##"<path class="tour" d="{d}" fill="none" stroke="#c0392b" stroke-width="2"/>"##
    );
    let on_tour: std::collections::HashSet<usize> = tour.iter().map(|&id| id - 1).collect();
    for p in pts {
        let (class, r, fill) = if on_tour.contains(&p.id) {
            ("dot visited", 5.0, "#c0392b")
        } else {
            ("dot", 3.0, "#333333")
        };
        let _ = writeln!(
            svg,
            r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"/>"#,
            sx(p.x),
            sy(p.y)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Status implied by a report's bounds, used when re-reading JSON.
pub fn status_of(report: &RunReport) -> Option<SolveStatus> {
    match report.status.as_str() {
        "optimal" => Some(SolveStatus::Optimal),
        "feasible" => Some(SolveStatus::Feasible),
        "bound-only" => Some(SolveStatus::BoundOnly),
        "timeout-no-incumbent" => Some(SolveStatus::TimeoutNoIncumbent),
        _ => None,
    }
}
