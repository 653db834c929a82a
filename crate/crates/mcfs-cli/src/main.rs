//! Command-line planner: plan, inspect, solve, measure, and render.
//!
//! Exit codes: 0 on success, 2 on invalid input or usage, 3 when the
//! instance is infeasible (some region is unreachable for every robot).

use clap::{Args, Parser, Subcommand, ValueEnum};
use mcfs::app::{plan, PlanConfig, PlanError, Variant};
use mcfs::cfs::SelectorKind;
use mcfs::geom::{build_distance_field, extract_isolines, Point2};
use mcfs::io;
use mcfs::isograph::{augment, bridge_components, build_isograph, EdgeKind};
use mcfs::metrics::evaluate;
use mcfs::mmrtc::{
    solve, warm_start, Backend, MmrtcError, MmrtcInstance, SolveOptions,
};
use mcfs::suite;
use mcfs::svg;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mcfs", version, about = "Multi-robot coverage path planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: isolines, graph, tree cover, stitching, metrics.
    Plan(PlanArgs),
    /// Extract isolines and print them as JSON.
    Isolines(IsolinesArgs),
    /// Build the isoline graph and print its structure as JSON.
    Isograph(IsographArgs),
    /// Solve the min-max tree cover over a dumped graph.
    Solve(SolveArgs),
    /// Recompute metrics from a workspace and a path file.
    Metrics(MetricsArgs),
    /// Render a workspace, optional isolines, and optional paths to SVG.
    Render(RenderArgs),
    /// Export the bundled benchmark workspaces as JSON files.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    None,
    Ref,
    Aug,
    Both,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::None => Variant::None,
            VariantArg::Ref => Variant::Refine,
            VariantArg::Aug => Variant::Augment,
            VariantArg::Both => Variant::Both,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectorArg {
    Random,
    Cfs,
    Mcs,
}

impl From<SelectorArg> for SelectorKind {
    fn from(s: SelectorArg) -> SelectorKind {
        match s {
            SelectorArg::Random => SelectorKind::Random,
            SelectorArg::Cfs => SelectorKind::Cfs,
            SelectorArg::Mcs => SelectorKind::Mcs,
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    /// Workspace JSON file.
    workspace: PathBuf,
    /// Track width (isoline spacing and cover diameter).
    #[arg(long)]
    l: f64,
    /// Robot group as K@X,Y; repeat for robots with different starts.
    #[arg(long = "robots", required = true)]
    robots: Vec<String>,
    #[arg(long, value_enum, default_value = "none")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "cfs")]
    selector: SelectorArg,
    /// Flip the transition-score objective of the mcs selector.
    #[arg(long)]
    mcs_argmax: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Shortcut reach in graph hops (default: robot count clamped to [2, 4]).
    #[arg(long)]
    delta: Option<u32>,
    /// Distance-field cell size (default: l/4).
    #[arg(long)]
    cell_size: Option<f64>,
    /// Solver budget in seconds (default: env MCFS_TIME_LIMIT, then 10).
    #[arg(long)]
    time_limit: Option<f64>,
    /// Solver backend: `bundled` or `external:<command>`.
    #[arg(long, default_value = "bundled")]
    solver: String,
    /// Cap on refinement steps.
    #[arg(long)]
    refine_iterations: Option<usize>,
    /// Record per-stage wall times in the report.
    #[arg(long)]
    timing: bool,
    /// Directory for report.json, paths.json/csv, plan.svg, trace.jsonl.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct IsolinesArgs {
    workspace: PathBuf,
    #[arg(long)]
    l: f64,
    #[arg(long)]
    cell_size: Option<f64>,
}

#[derive(Args)]
struct IsographArgs {
    workspace: PathBuf,
    #[arg(long)]
    l: f64,
    #[arg(long)]
    cell_size: Option<f64>,
    /// Also add shortcut edges with this reach.
    #[arg(long)]
    delta: Option<u32>,
}

#[derive(Args)]
struct SolveArgs {
    /// Graph JSON produced by the `isograph` subcommand.
    graph: PathBuf,
    /// Root vertex ids, comma-separated, one per robot.
    #[arg(long, value_delimiter = ',', required = true)]
    roots: Vec<usize>,
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value = "bundled")]
    solver: String,
    /// Also export the integer program in LP text format to this file.
    #[arg(long)]
    lp: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsArgs {
    workspace: PathBuf,
    /// Paths JSON produced by the `plan` subcommand.
    #[arg(long)]
    paths: PathBuf,
    #[arg(long)]
    l: f64,
}

#[derive(Args)]
struct RenderArgs {
    workspace: PathBuf,
    /// Optional paths JSON to overlay.
    #[arg(long)]
    paths: Option<PathBuf>,
    /// Overlay isolines at this spacing.
    #[arg(long)]
    l: Option<f64>,
    #[arg(long)]
    cell_size: Option<f64>,
    /// Output SVG file.
    #[arg(long, default_value = "render.svg")]
    out: PathBuf,
}

#[derive(Args)]
struct SuiteArgs {
    /// Directory to write one JSON file per bundled workspace.
    #[arg(long, default_value = "workspaces")]
    out: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Invalid(String),
    Infeasible(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Infeasible(m) => m,
        }
    }
}

impl From<io::IoError> for CliError {
    fn from(e: io::IoError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        if e.is_infeasible() {
            CliError::Infeasible(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}

impl From<MmrtcError> for CliError {
    fn from(e: MmrtcError) -> Self {
        match e {
            MmrtcError::UnreachableVertex(_) => CliError::Infeasible(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<mcfs::geom::GeomError> for CliError {
    fn from(e: mcfs::geom::GeomError) -> Self {
        PlanError::from(e).into()
    }
}

impl From<mcfs::isograph::IsographError> for CliError {
    fn from(e: mcfs::isograph::IsographError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

/// Expand repeatable `K@X,Y` robot groups into one start point per robot.
fn parse_robots(specs: &[String]) -> Result<Vec<Point2>, CliError> {
    let mut roots = Vec::new();
    for spec in specs {
        let bad = || CliError::Invalid(format!("robot spec `{spec}` is not K@X,Y"));
        let (count, point) = spec.split_once('@').ok_or_else(bad)?;
        let k: usize = count.trim().parse().map_err(|_| bad())?;
        let (x, y) = point.split_once(',').ok_or_else(bad)?;
        let x: f64 = x.trim().parse().map_err(|_| bad())?;
        let y: f64 = y.trim().parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        roots.extend(std::iter::repeat(Point2::new(x, y)).take(k));
    }
    Ok(roots)
}

fn parse_solver(spec: &str) -> Result<Backend, CliError> {
    if spec == "bundled" {
        Ok(Backend::Bundled)
    } else if let Some(cmd) = spec.strip_prefix("external:") {
        if cmd.is_empty() {
            Err(CliError::Invalid("external solver command is empty".into()))
        } else {
            Ok(Backend::External(cmd.to_string()))
        }
    } else {
        Err(CliError::Invalid(format!(
            "solver `{spec}` is neither `bundled` nor `external:<command>`"
        )))
    }
}

/// Explicit flag, else MCFS_TIME_LIMIT, else ten seconds.
fn resolve_time_limit(flag: Option<f64>) -> Result<f64, CliError> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var("MCFS_TIME_LIMIT") {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Invalid(format!("MCFS_TIME_LIMIT `{v}` is not a number"))
        }),
        Err(_) => Ok(10.0),
    }
}

fn build_graph(
    workspace: &Path,
    l: f64,
    cell_size: Option<f64>,
    delta: Option<u32>,
) -> Result<(mcfs::geom::Workspace, mcfs::isograph::Isograph), CliError> {
    let ws = io::read_workspace(workspace)?;
    let field = build_distance_field(&ws, cell_size.unwrap_or(l / 4.0))?;
    let isolines = extract_isolines(&field, l)?;
    let mut g = build_isograph(isolines, l)?;
    if !g.connected {
        bridge_components(&mut g);
    }
    if let Some(d) = delta {
        g = augment(&g, d, &ws)?;
    }
    Ok((ws, g))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Plan(args) => {
            let ws = io::read_workspace(&args.workspace)?;
            let cfg = PlanConfig {
                l: args.l,
                roots: parse_robots(&args.robots)?,
                variant: args.variant.into(),
                selector: args.selector.into(),
                mcs_argmax: args.mcs_argmax,
                seed: args.seed,
                delta: args.delta,
                cell_size: args.cell_size,
                time_limit: resolve_time_limit(args.time_limit)?,
                backend: parse_solver(&args.solver)?,
                refine_iterations: args.refine_iterations,
                include_timing: args.timing,
            };
            let out = plan(&ws, &cfg)?;
            std::fs::create_dir_all(&args.out)?;
            let report = serde_json::to_string_pretty(&out.report)?;
            std::fs::write(args.out.join("report.json"), format!("{report}\n"))?;
            std::fs::write(args.out.join("paths.json"), io::paths_json(&out.paths)?)?;
            std::fs::write(args.out.join("paths.csv"), io::paths_csv(&out.paths))?;
            let drawing = svg::render(&ws, &out.isolines(), &out.paths);
            std::fs::write(args.out.join("plan.svg"), drawing)?;
            if !out.trace.is_empty() {
                io::write_trace(&out.trace, &args.out.join("trace.jsonl"))?;
            }
            println!("{report}");
            Ok(())
        }
        Command::Isolines(args) => {
            let ws = io::read_workspace(&args.workspace)?;
            let field = build_distance_field(&ws, args.cell_size.unwrap_or(args.l / 4.0))?;
            let isolines = extract_isolines(&field, args.l)?;
            println!("{}", serde_json::to_string_pretty(&isolines)?);
            Ok(())
        }
        Command::Isograph(args) => {
            let (_, g) = build_graph(&args.workspace, args.l, args.cell_size, args.delta)?;
            println!("{}", io::graph_json(&g)?);
            Ok(())
        }
        Command::Solve(args) => {
            let dump = io::read_graph(&args.graph)?;
            let weights: Vec<f64> = dump.vertices.iter().map(|v| v.weight).collect();
            let edges: Vec<(usize, usize, f64, bool)> = dump
                .edges
                .iter()
                .map(|e| (e.u, e.v, e.weight, e.kind != EdgeKind::Augmented))
                .collect();
            let inst = MmrtcInstance::new(weights, edges, args.roots.clone())?;
            let warm = warm_start(&inst)?;
            if let Some(lp_path) = &args.lp {
                let model = mcfs::mmrtc::build_model(&inst);
                let mut file = std::fs::File::create(lp_path)?;
                mcfs::mmrtc::write_lp(&model, &mut file)?;
            }
            let opts = SolveOptions {
                time_limit: resolve_time_limit(args.time_limit)?,
                backend: parse_solver(&args.solver)?,
            };
            let outcome = solve(&inst, &warm, &opts)?;
            let body = serde_json::json!({
                "status": outcome.status,
                "makespan": outcome.cover.makespan,
                "costs": outcome.cover.costs,
                "incumbents": outcome.incumbents,
                "trees": outcome.cover.trees,
            });
            println!("{}", serde_json::to_string_pretty(&body)?);
            Ok(())
        }
        Command::Metrics(args) => {
            let ws = io::read_workspace(&args.workspace)?;
            let paths = io::read_paths(&args.paths)?;
            if paths.is_empty() {
                return Err(CliError::Invalid("path file holds no paths".into()));
            }
            let m = evaluate(&ws, &paths, args.l);
            println!("{}", serde_json::to_string_pretty(&m)?);
            Ok(())
        }
        Command::Render(args) => {
            let ws = io::read_workspace(&args.workspace)?;
            let isolines = match args.l {
                Some(l) => {
                    let field = build_distance_field(&ws, args.cell_size.unwrap_or(l / 4.0))?;
                    extract_isolines(&field, l)?
                }
                None => Vec::new(),
            };
            let paths = match &args.paths {
                Some(p) => io::read_paths(p)?,
                None => Vec::new(),
            };
            std::fs::write(&args.out, svg::render(&ws, &isolines, &paths))?;
            println!("wrote {}", args.out.display());
            Ok(())
        }
        Command::Suite(args) => {
            std::fs::create_dir_all(&args.out)?;
            for case in suite::cases() {
                let path = args.out.join(format!("{}.json", case.workspace.name));
                io::write_workspace(&case.workspace, &path)?;
                let roots: Vec<String> = case
                    .roots
                    .iter()
                    .map(|r| format!("{},{}", r.x, r.y))
                    .collect();
                println!(
                    "wrote {} (l = {}, starts at {})",
                    path.display(),
                    case.l,
                    roots.join(" and ")
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
