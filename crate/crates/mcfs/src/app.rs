//! End-to-end planning pipeline: workspace in, per-robot coverage paths out.
//!
//! Stages: signed distance field, isoline extraction, graph construction
//! (with component bridging), optional shortcut augmentation, min-max tree
//! cover solving from a spanning-forest warm start, optional split
//! refinement, spiral stitching per robot, and metric evaluation.

use crate::cfs::{unified_cfs, CfsError, CoveragePath, SelectorConfig, SelectorKind};
use crate::geom::{
    build_distance_field, extract_isolines, GeomError, Isoline, Point2, Workspace,
};
use crate::isograph::{augment, bridge_components, build_isograph, Isograph, IsographError};
use crate::metrics::{evaluate, Metrics};
use crate::mmrtc::{
    solve, warm_start, Backend, MmrtcError, MmrtcInstance, SolveOptions, SolveStatus, TreeCover,
};
use crate::refine::{refine, RefineOptions, TraceRecord};
use serde::Serialize;
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum PlanError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Graph(#[from] IsographError),
    #[error(transparent)]
    Solve(#[from] MmrtcError),
    #[error(transparent)]
    Stitch(#[from] CfsError),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl PlanError {
    /// True when the instance admits no solution (as opposed to bad input).
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            PlanError::Solve(MmrtcError::UnreachableVertex(_))
                | PlanError::Geom(GeomError::NoCoverableLayers { .. })
        )
    }
}

/// Which optional stages run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Solve and stitch only.
    None,
    /// Add split refinement.
    Refine,
    /// Add shortcut augmentation.
    Augment,
    /// Augmentation and refinement.
    Both,
}

impl Variant {
    pub fn refines(self) -> bool {
        matches!(self, Variant::Refine | Variant::Both)
    }
    pub fn augments(self) -> bool {
        matches!(self, Variant::Augment | Variant::Both)
    }
}

#[derive(Debug, Clone)]
pub struct PlanConfig {
    /// Track width (isoline spacing).
    pub l: f64,
    /// One start position per robot.
    pub roots: Vec<Point2>,
    pub variant: Variant,
    pub selector: SelectorKind,
    pub mcs_argmax: bool,
    pub seed: u64,
    /// Shortcut reach; defaults to the robot count clamped into [2, 4].
    pub delta: Option<u32>,
    /// Distance-field resolution; defaults to a quarter track.
    pub cell_size: Option<f64>,
    pub time_limit: f64,
    pub backend: Backend,
    pub refine_iterations: Option<usize>,
    /// Record stage wall times in the report (breaks byte determinism).
    pub include_timing: bool,
}

impl PlanConfig {
    pub fn new(l: f64, roots: Vec<Point2>) -> Self {
        PlanConfig {
            l,
            roots,
            variant: Variant::None,
            selector: SelectorKind::Cfs,
            mcs_argmax: false,
            seed: 0,
            delta: None,
            cell_size: None,
            time_limit: 10.0,
            backend: Backend::Bundled,
            refine_iterations: None,
            include_timing: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlanReport {
    pub workspace: String,
    pub l: f64,
    pub variant: Variant,
    pub robots: usize,
    pub layers: u32,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub solve_status: SolveStatus,
    /// Solver incumbent makespans (tree costs), best last.
    pub incumbents: Vec<f64>,
    pub tree_costs: Vec<f64>,
    pub cost_makespan: f64,
    /// Per-robot emitted point counts.
    pub path_points: Vec<usize>,
    pub refine_steps: usize,
    pub metrics: Metrics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u128>>,
}

#[derive(Debug)]
pub struct PlanOutcome {
    pub report: PlanReport,
    pub paths: Vec<CoveragePath>,
    pub graph: Isograph,
    pub cover: TreeCover,
    pub trace: Vec<TraceRecord>,
    /// Vertex count before refinement added loop vertices.
    pub n_original_vertices: usize,
}

impl PlanOutcome {
    /// The extracted isolines (refinement loop vertices excluded).
    pub fn isolines(&self) -> Vec<Isoline> {
        self.graph.vertices[..self.n_original_vertices]
            .iter()
            .map(|v| v.isoline.clone())
            .collect()
    }
}

/// Map each start position to its nearest graph vertex (ties to lowest id).
pub fn nearest_vertices(g: &Isograph, roots: &[Point2]) -> Vec<usize> {
    roots
        .iter()
        .map(|&r| {
            let mut best = (f64::INFINITY, 0usize);
            for v in &g.vertices {
                let d = v
                    .isoline
                    .points
                    .iter()
                    .map(|p| p.dist(r))
                    .fold(f64::INFINITY, f64::min);
                if d < best.0 {
                    best = (d, v.id);
                }
            }
            best.1
        })
        .collect()
}

/// Run the full pipeline on one workspace.
pub fn plan(ws: &Workspace, cfg: &PlanConfig) -> Result<PlanOutcome, PlanError> {
    if !(cfg.l.is_finite() && cfg.l > 0.0) {
        return Err(PlanError::Invalid(format!("track width {} must be positive", cfg.l)));
    }
    if cfg.roots.is_empty() {
        return Err(PlanError::Invalid("at least one robot start is required".into()));
    }
    let k = cfg.roots.len();
    if k > 8 {
        return Err(PlanError::Invalid(format!("{k} robots exceeds the supported 8")));
    }
    let mut timings: BTreeMap<String, u128> = BTreeMap::new();
    let mut clock = Instant::now();
    let lap = |name: &str, timings: &mut BTreeMap<String, u128>, clock: &mut Instant| {
        timings.insert(name.to_string(), clock.elapsed().as_millis());
        *clock = Instant::now();
    };

    let cell = cfg.cell_size.unwrap_or(cfg.l / 4.0);
    let field = build_distance_field(ws, cell)?;
    let isolines = extract_isolines(&field, cfg.l)?;
    lap("isolines", &mut timings, &mut clock);

    let mut graph = build_isograph(isolines, cfg.l)?;
    if !graph.connected {
        bridge_components(&mut graph);
    }
    if cfg.variant.augments() {
        let delta = cfg.delta.unwrap_or((k as u32).clamp(2, 4));
        graph = augment(&graph, delta, ws)?;
    }
    lap("graph", &mut timings, &mut clock);

    let root_ids = nearest_vertices(&graph, &cfg.roots);
    let inst = MmrtcInstance::from_isograph(&graph, root_ids)?;
    let warm = warm_start(&inst)?;
    let opts = SolveOptions { time_limit: cfg.time_limit, backend: cfg.backend.clone() };
    let solved = solve(&inst, &warm, &opts)?;
    lap("solve", &mut timings, &mut clock);

    let n_original = graph.vertices.len();
    let (cover, graph, trace) = if cfg.variant.refines() {
        let out = refine(
            &graph,
            &solved.cover,
            &RefineOptions { max_iterations: cfg.refine_iterations },
        );
        (out.cover, out.graph, out.trace)
    } else {
        (solved.cover.clone(), graph, Vec::new())
    };
    lap("refine", &mut timings, &mut clock);

    let selector = SelectorConfig { kind: cfg.selector, seed: cfg.seed, mcs_argmax: cfg.mcs_argmax };
    let mut paths = Vec::with_capacity(k);
    for (robot, tree) in cover.trees.iter().enumerate() {
        paths.push(unified_cfs(&graph, tree, robot, &selector)?);
    }
    lap("stitch", &mut timings, &mut clock);

    let metrics = evaluate(ws, &paths, cfg.l);
    lap("metrics", &mut timings, &mut clock);

    let report = PlanReport {
        workspace: ws.name.clone(),
        l: cfg.l,
        variant: cfg.variant,
        robots: k,
        layers: graph.vertices[..n_original]
            .iter()
            .map(|v| v.layer())
            .max()
            .unwrap_or(0),
        n_vertices: graph.vertices.len(),
        n_edges: graph.edges.len(),
        solve_status: solved.status,
        incumbents: solved.incumbents.clone(),
        tree_costs: cover.costs.clone(),
        cost_makespan: cover.makespan,
        path_points: paths.iter().map(|p| p.points.len()).collect(),
        refine_steps: trace.len(),
        metrics,
        timings_ms: cfg.include_timing.then_some(timings),
    };
    Ok(PlanOutcome {
        report,
        paths,
        graph,
        cover,
        trace,
        n_original_vertices: n_original,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suite;

    #[test]
    fn disc_plan_covers_well() {
        let case = suite::disc();
        let cfg = PlanConfig::new(case.l, case.roots.clone());
        let out = plan(&case.workspace, &cfg).unwrap();
        assert_eq!(out.paths.len(), 2);
        assert!(out.report.metrics.coverage_ratio >= 0.85, "coverage {}", out.report.metrics.coverage_ratio);
        for p in &out.paths {
            assert!(p.max_gap() <= 2.5 * case.l, "gap {}", p.max_gap());
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let case = suite::disc();
        let mut cfg = PlanConfig::new(0.0, case.roots.clone());
        assert!(matches!(plan(&case.workspace, &cfg), Err(PlanError::Invalid(_))));
        cfg = PlanConfig::new(case.l, vec![]);
        assert!(matches!(plan(&case.workspace, &cfg), Err(PlanError::Invalid(_))));
        cfg = PlanConfig::new(5.0, case.roots.clone());
        let err = plan(&case.workspace, &cfg).unwrap_err();
        assert!(err.is_infeasible());
    }

    #[test]
    fn annulus_needs_bridging_and_plans() {
        let case = suite::annulus();
        let cfg = PlanConfig::new(case.l, case.roots.clone());
        let out = plan(&case.workspace, &cfg).unwrap();
        assert_eq!(out.paths.len(), 2);
        // Both robots get nonempty work on their own side of the ring.
        for p in &out.paths {
            assert!(!p.points.is_empty());
        }
        assert!(out.report.metrics.coverage_ratio >= 0.85);
    }

    #[test]
    fn refine_variant_tracks_trace_and_new_vertices() {
        let case = suite::disc();
        let mut cfg = PlanConfig::new(case.l, case.roots.clone());
        cfg.variant = Variant::Refine;
        let out = plan(&case.workspace, &cfg).unwrap();
        assert_eq!(out.report.refine_steps, out.trace.len());
        assert!(out.n_original_vertices <= out.graph.vertices.len());
        assert_eq!(out.isolines().len(), out.n_original_vertices);
    }

    #[test]
    fn reports_are_deterministic_without_timing() {
        let case = suite::two_lobed();
        let cfg = PlanConfig::new(case.l, case.roots.clone());
        let a = plan(&case.workspace, &cfg).unwrap();
        let b = plan(&case.workspace, &cfg).unwrap();
        let ja = serde_json::to_string(&a.report).unwrap();
        let jb = serde_json::to_string(&b.report).unwrap();
        assert_eq!(ja, jb);
        assert!(!ja.contains("timings"));
        let mut cfg_t = cfg.clone();
        cfg_t.include_timing = true;
        let c = plan(&case.workspace, &cfg_t).unwrap();
        assert!(serde_json::to_string(&c.report).unwrap().contains("timings_ms"));
    }

    #[test]
    fn nearest_vertex_mapping_prefers_close_rings() {
        let case = suite::disc();
        let cfg = PlanConfig::new(case.l, case.roots.clone());
        let out = plan(&case.workspace, &cfg).unwrap();
        // Starts near the rim map to the outermost ring (layer 1).
        let ids = nearest_vertices(&out.graph, &case.roots);
        for id in ids {
            assert_eq!(out.graph.vertex(id).layer(), 1);
        }
    }
}
