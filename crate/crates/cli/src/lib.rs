//! Command-line front end: point queries, grid sweeps, reconstructions, error
//! tables and finite-volume comparisons, all emitted as CSV.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use ccl_core::entropy::reconstruct::ReconstructOptions;
use ccl_core::fvref::{FvGrid, Limiter};
use ccl_core::problems::{self, analytic_error, Grid, ProblemDocument, ProblemError, ProblemSpec, Rect, SolveError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

/// Environment variable holding the worker count for parallel runs.
pub const WORKERS_ENV: &str = "CCL_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("tolerance gate failed: {0}")]
    Gate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Gate(_) => 4,
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        CliError::Solver(e.to_string())
    }
}

impl From<ProblemError> for CliError {
    fn from(e: ProblemError) -> Self {
        match e {
            ProblemError::Solve(s) => s.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "ccl", version, about = "Pointwise entropy solutions of convex conservation laws")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve at a single (x, t).
    Point(PointArgs),
    /// Solve on a uniform space-time grid.
    Grid(GridArgs),
    /// Piecewise reconstruction of u(·, t) with located shocks.
    Reconstruct(ReconstructArgs),
    /// Error against analytic solutions or oracles.
    Table(TableArgs),
    /// Finite-volume cell averages next to pointwise values at cell centres.
    FvCompare(FvArgs),
    /// Print the catalog, or one problem as JSON.
    List(ListArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Catalog name or path to a problem JSON document.
    #[arg(long, short)]
    pub problem: String,
    /// Write CSV here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Newton tolerance for space-dependent problems.
    #[arg(long)]
    pub bvp_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct Ranges {
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
}

impl Ranges {
    fn rect(&self, default: Rect) -> Result<Rect, CliError> {
        let r = Rect {
            x: (self.x_min.unwrap_or(default.x.0), self.x_max.unwrap_or(default.x.1)),
            t: (self.t_min.unwrap_or(default.t.0), self.t_max.unwrap_or(default.t.1)),
        };
        if !(r.x.0 <= r.x.1) || !(r.t.0 <= r.t.1) || r.t.0 < 0.0 {
            return Err(CliError::Config(format!("bad ranges x {:?} t {:?}", r.x, r.t)));
        }
        Ok(r)
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub ranges: Ranges,
    #[arg(long, default_value_t = 11)]
    pub nx: usize,
    #[arg(long, default_value_t = 11)]
    pub nt: usize,
    /// Spread points over the worker pool.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    /// Output sample count.
    #[arg(long, default_value_t = 1001)]
    pub samples: usize,
    /// Smallest one-sided difference reported as a shock.
    #[arg(long, default_value_t = 1e-8)]
    pub jump_tol: f64,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Catalog name or JSON path; all problems with a reference when omitted.
    #[arg(long, short)]
    pub problem: Option<String>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub ranges: Ranges,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
    /// Largest acceptable max_abs; per-problem defaults otherwise.
    #[arg(long)]
    pub gate: Option<f64>,
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub bvp_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LimiterArg {
    VanLeer,
    LaxWendroff,
    Upwind,
}

#[derive(Debug, Args)]
pub struct FvArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    #[arg(long, default_value_t = 500)]
    pub ncells: usize,
    #[arg(long, default_value_t = 0.9)]
    pub cfl: f64,
    #[arg(long, value_enum, default_value_t = LimiterArg::VanLeer)]
    pub limiter: LimiterArg,
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    /// Print this problem as a JSON document.
    #[arg(long)]
    pub json: Option<String>,
}

/// 17 significant digits, trailing zeros dropped; scientific outside `[1e-5, 1e17)`.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{v:.16e}");
        let (m, e) = s.split_once('e').expect("scientific form");
        let m = if m.contains('.') {
            m.trim_end_matches('0').trim_end_matches('.')
        } else {
            m
        };
        format!("{m}e{e}")
    }
}

/// Worker count from [`WORKERS_ENV`]; `None` means hardware parallelism.
pub fn workers_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got {s:?}"))),
        Err(_) => Ok(None),
    }
}

pub fn load_problem(name_or_path: &str) -> Result<ProblemSpec, CliError> {
    if problems::NAMES.contains(&name_or_path) {
        return Ok(problems::by_name(name_or_path)?);
    }
    let text = std::fs::read_to_string(name_or_path)
        .map_err(|e| CliError::Config(format!("{name_or_path:?} is neither a catalog problem nor a readable file: {e}")))?;
    Ok(ProblemDocument::from_json(&text)?.into_spec()?)
}

fn csv_writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf)
}

fn header(spec: &ProblemSpec, base: &[&str]) -> Vec<String> {
    let mut h: Vec<String> = base.iter().map(|s| s.to_string()).collect();
    if let Some(tr) = spec.transform {
        h.push(tr.label().to_string());
    }
    h
}

fn sample_row(spec: &ProblemSpec, s: &ccl_core::entropy::SolutionSample) -> Vec<String> {
    let mut row = vec![fmt_f64(s.x), fmt_f64(s.t), fmt_f64(s.u), fmt_f64(s.j)];
    if let Some(tr) = spec.transform {
        row.push(fmt_f64(tr.apply(s.u)));
    }
    row
}

fn solver_for(spec: &ProblemSpec, bvp_tol: Option<f64>) -> Result<problems::PointSolver, CliError> {
    let s = spec.solver()?;
    Ok(match bvp_tol {
        Some(tol) if tol > 0.0 => s.with_bvp_tol(tol),
        Some(tol) => return Err(CliError::Config(format!("bvp tolerance must be positive, got {tol}"))),
        None => s,
    })
}

fn check_count(name: &str, n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Config(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// Run `cli` with an optional fixed worker count and return the CSV bytes.
///
/// Informational lines (e.g. FV summaries) go to `log`.
pub fn run(cli: &Cli, workers: Option<usize>, log: &mut (dyn Write + Send)) -> Result<Vec<u8>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| dispatch(&cli.command, log))
}

fn dispatch(cmd: &Command, log: &mut (dyn Write + Send)) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    match cmd {
        Command::Point(a) => {
            let spec = load_problem(&a.common.problem)?;
            let solver = solver_for(&spec, a.common.bvp_tol)?;
            let s = solver.solve_point(a.x, a.t)?;
            let mut w = csv_writer(&mut buf);
            w.write_record(header(&spec, &["x", "t", "u", "J"]))?;
            w.write_record(sample_row(&spec, &s))?;
            w.flush()?;
        }
        Command::Grid(a) => {
            check_count("nx", a.nx)?;
            check_count("nt", a.nt)?;
            let spec = load_problem(&a.common.problem)?;
            let rect = a.ranges.rect(spec.domain_xt)?;
            let solver = solver_for(&spec, a.common.bvp_tol)?;
            let grid = Grid {
                rect,
                nx: a.nx,
                nt: a.nt,
            };
            let samples = solver.solve_grid(&grid.xs(), &grid.ts(), a.parallel)?;
            let mut w = csv_writer(&mut buf);
            w.write_record(header(&spec, &["x", "t", "u", "J"]))?;
            for s in &samples {
                w.write_record(sample_row(&spec, s))?;
            }
            w.flush()?;
        }
        Command::Reconstruct(a) => {
            check_count("samples", a.samples)?;
            let spec = load_problem(&a.common.problem)?;
            let lo = a.x_min.unwrap_or(spec.domain_xt.x.0);
            let hi = a.x_max.unwrap_or(spec.domain_xt.x.1);
            if !(lo < hi) || !(a.t > 0.0) {
                return Err(CliError::Config(format!("need x_min < x_max and t > 0, got [{lo}, {hi}], t = {}", a.t)));
            }
            let solver = solver_for(&spec, a.common.bvp_tol)?;
            let opts = ReconstructOptions {
                jump_tol: a.jump_tol,
                ..ReconstructOptions::default()
            };
            let rec = solver.reconstruct(a.t, lo, hi, &opts).map_err(|e| CliError::Solver(e.to_string()))?;
            let mut w = csv_writer(&mut buf);
            w.write_record(["kind", "x", "u_left", "u_right"])?;
            for x in problems::linspace(lo, hi, a.samples) {
                let u = rec.u.evaluate(x).map_err(|e| CliError::Solver(e.to_string()))?;
                w.write_record(["sample".to_string(), fmt_f64(x), fmt_f64(u), fmt_f64(u)])?;
            }
            for s in &rec.shocks {
                w.write_record(["shock".to_string(), fmt_f64(s.x), fmt_f64(s.u_left), fmt_f64(s.u_right)])?;
            }
            for &k in &rec.kinks {
                let u = rec.u.evaluate(k).map_err(|e| CliError::Solver(e.to_string()))?;
                w.write_record(["kink".to_string(), fmt_f64(k), fmt_f64(u), fmt_f64(u)])?;
            }
            w.flush()?;
        }
        Command::Table(a) => {
            let specs: Vec<ProblemSpec> = match &a.problem {
                Some(p) => vec![load_problem(p)?],
                None => problems::catalog().into_iter().filter(|s| s.reference().is_some()).collect(),
            };
            let mut failures = Vec::new();
            {
                let mut w = csv_writer(&mut buf);
                w.write_record([
                    "problem",
                    "nx",
                    "nt",
                    "x_min",
                    "x_max",
                    "t_min",
                    "t_max",
                    "max_abs",
                    "l1",
                    "excluded",
                    "runtime_s",
                    "points_per_s",
                ])?;
                for spec in &specs {
                    let (nx, nt, default_gate) = table_defaults(&spec.name);
                    let grid = Grid {
                        rect: a.ranges.rect(spec.domain_xt)?,
                        nx: a.nx.unwrap_or(nx),
                        nt: a.nt.unwrap_or(nt),
                    };
                    check_count("nx", grid.nx)?;
                    check_count("nt", grid.nt)?;
                    let solver = solver_for(spec, a.bvp_tol)?;
                    let start = Instant::now();
                    let r = analytic_error(spec, &solver, &grid, a.parallel)?;
                    let secs = start.elapsed().as_secs_f64();
                    let gate = a.gate.unwrap_or(default_gate);
                    if !(r.max_abs <= gate) {
                        failures.push(format!("{}: max_abs {} > {}", spec.name, fmt_f64(r.max_abs), fmt_f64(gate)));
                    }
                    w.write_record([
                        spec.name.clone(),
                        grid.nx.to_string(),
                        grid.nt.to_string(),
                        fmt_f64(grid.rect.x.0),
                        fmt_f64(grid.rect.x.1),
                        fmt_f64(grid.rect.t.0),
                        fmt_f64(grid.rect.t.1),
                        fmt_f64(r.max_abs),
                        fmt_f64(r.l1),
                        r.excluded_points.to_string(),
                        fmt_f64(secs),
                        fmt_f64(r.points as f64 / secs.max(1e-9)),
                    ])?;
                }
                w.flush()?;
            }
            if !failures.is_empty() {
                // the table is still useful, so emit it before failing
                log.write_all(&buf)?;
                return Err(CliError::Gate(failures.join("; ")));
            }
        }
        Command::FvCompare(a) => {
            let spec = load_problem(&a.common.problem)?;
            let flux = spec
                .convex_flux()
                .ok_or_else(|| CliError::Config(format!("{} has a space-dependent flux", spec.name)))?;
            let lo = a.x_min.unwrap_or(spec.domain_xt.x.0);
            let hi = a.x_max.unwrap_or(spec.domain_xt.x.1);
            if !(a.cfl > 0.0 && a.cfl <= 1.0) || !(a.t >= 0.0) {
                return Err(CliError::Config(format!("need 0 < cfl ≤ 1 and t ≥ 0, got {} and {}", a.cfl, a.t)));
            }
            let limiter = match a.limiter {
                LimiterArg::VanLeer => Limiter::VanLeer,
                LimiterArg::LaxWendroff => Limiter::LaxWendroff,
                LimiterArg::Upwind => Limiter::Upwind,
            };
            let mut grid = FvGrid::init_from(spec.init.g_pf(), lo, hi, a.ncells)
                .map_err(|e| CliError::Config(e.to_string()))?
                .with_cfl(a.cfl);
            let start = Instant::now();
            let steps = grid.run_until(flux, a.t, limiter).map_err(|e| CliError::Solver(e.to_string()))?;
            let fv_secs = start.elapsed().as_secs_f64();
            let solver = solver_for(&spec, a.common.bvp_tol)?;
            let centers = grid.centers();
            let samples = solver.solve_grid(&centers, &[a.t], a.parallel)?;
            let mut l1 = 0.0;
            let mut w = csv_writer(&mut buf);
            let mut head = vec!["x".to_string(), "fv".into(), "pointwise".into()];
            if let Some(tr) = spec.transform {
                head.push(format!("fv_{}", tr.label()));
                head.push(format!("pointwise_{}", tr.label()));
            }
            w.write_record(&head)?;
            for ((x, &fv), s) in centers.iter().zip(grid.cell_averages()).zip(&samples) {
                l1 += (fv - s.u).abs() * grid.dx();
                let mut row = vec![fmt_f64(*x), fmt_f64(fv), fmt_f64(s.u)];
                if let Some(tr) = spec.transform {
                    row.push(fmt_f64(tr.apply(fv)));
                    row.push(fmt_f64(tr.apply(s.u)));
                }
                w.write_record(&row)?;
            }
            w.flush()?;
            writeln!(log, "fv steps = {steps}, fv time = {fv_secs:.4} s, l1 = {}", fmt_f64(l1))?;
        }
        Command::List(a) => match &a.json {
            Some(name) => {
                let spec = load_problem(name)?;
                let doc = spec
                    .to_document()
                    .ok_or_else(|| CliError::Config(format!("{} has no JSON form (space-dependent flux)", spec.name)))?;
                buf.extend_from_slice(doc.to_json().as_bytes());
                buf.push(b'\n');
            }
            None => {
                let mut w = csv_writer(&mut buf);
                w.write_record(["name", "x_min", "x_max", "t_min", "t_max", "reference", "notes"])?;
                for s in problems::catalog() {
                    let reference = if s.analytic.is_some() {
                        "analytic"
                    } else if s.oracle.is_some() {
                        "oracle"
                    } else {
                        "none"
                    };
                    w.write_record([
                        s.name.clone(),
                        fmt_f64(s.domain_xt.x.0),
                        fmt_f64(s.domain_xt.x.1),
                        fmt_f64(s.domain_xt.t.0),
                        fmt_f64(s.domain_xt.t.1),
                        reference.into(),
                        s.notes.clone(),
                    ])?;
                }
                w.flush()?;
            }
        },
    }
    Ok(buf)
}

/// Grid size and gate used by `table` when not overridden.
pub fn table_defaults(name: &str) -> (usize, usize, f64) {
    match name {
        "burgers_box" => (100, 100, 1e-12),
        "burgers_sine" => (80, 80, 1e-10),
        "exp_coefficient" => (30, 30, 1e-8),
        "harmonic_box" => (40, 40, 1e-8),
        _ => (50, 50, 1e-8),
    }
}
