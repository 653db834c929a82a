//! Min-max rooted tree cover: split the isograph into one tree per robot.
//!
//! Every vertex must belong to at least one tree, tree `i` must contain its
//! root `r_i`, and the makespan (the largest tree cost, vertex weights plus
//! edge weights) is minimized. The problem is formulated as an explicit MIP
//! (exportable in LP text format for an external solver) and solved exactly
//! by a bundled best-first branch-and-bound: vertex-membership variables are
//! branched on directly, and given a full membership the optimal edge
//! selection is the minimum spanning tree of each induced subgraph.

use crate::isograph::{EdgeKind, Isograph};
use serde::Serialize;
use std::collections::BTreeSet;
use std::time::Instant;

#[derive(Debug, thiserror::Error)]
pub enum MmrtcError {
    #[error("root id {0} is not a graph vertex")]
    RootOutOfRange(usize),
    #[error("vertex {0} is unreachable from every root")]
    UnreachableVertex(usize),
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
    #[error("external solver failed: {0}")]
    External(String),
    #[error("no robots configured")]
    NoRobots,
}

/// One instance: weighted graph plus one root vertex per robot.
#[derive(Debug, Clone)]
pub struct MmrtcInstance {
    pub weights: Vec<f64>,
    /// (u, v, weight, base) with u < v; base edges carry the warm start.
    pub edges: Vec<(usize, usize, f64, bool)>,
    pub roots: Vec<usize>,
}

impl MmrtcInstance {
    pub fn new(
        weights: Vec<f64>,
        edges: Vec<(usize, usize, f64, bool)>,
        roots: Vec<usize>,
    ) -> Result<Self, MmrtcError> {
        if roots.is_empty() {
            return Err(MmrtcError::NoRobots);
        }
        let n = weights.len();
        for &r in &roots {
            if r >= n {
                return Err(MmrtcError::RootOutOfRange(r));
            }
        }
        let edges = edges
            .into_iter()
            .map(|(u, v, w, b)| (u.min(v), u.max(v), w, b))
            .collect();
        Ok(MmrtcInstance { weights, edges, roots })
    }

    pub fn from_isograph(g: &Isograph, roots: Vec<usize>) -> Result<Self, MmrtcError> {
        let weights = g.vertices.iter().map(|v| v.weight()).collect();
        let edges = g
            .edges
            .iter()
            .map(|e| (e.u, e.v, e.weight, e.kind != EdgeKind::Augmented))
            .collect();
        MmrtcInstance::new(weights, edges, roots)
    }

    pub fn n_vertices(&self) -> usize {
        self.weights.len()
    }

    pub fn n_robots(&self) -> usize {
        self.roots.len()
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for (i, &(u, v, _, _)) in self.edges.iter().enumerate() {
            adj[u].push((v, i));
            adj[v].push((u, i));
        }
        adj
    }
}

/// One robot's tree: vertex set plus edge set, rooted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tree {
    pub root: usize,
    pub vertices: BTreeSet<usize>,
    /// Normalized (min, max) pairs.
    pub edges: BTreeSet<(usize, usize)>,
}

impl Tree {
    pub fn singleton(root: usize) -> Self {
        Tree { root, vertices: BTreeSet::from([root]), edges: BTreeSet::new() }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.contains(&v)
    }

    /// Tree neighbors of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Degree-one vertices (tree leaves).
    pub fn leaves(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .cloned()
            .filter(|&v| self.neighbors(v).len() == 1)
            .collect()
    }

    /// Connected, acyclic, and rooted over its own vertex set.
    pub fn is_valid(&self) -> bool {
        if !self.vertices.contains(&self.root) {
            return false;
        }
        if self.edges.len() + 1 != self.vertices.len() {
            return false;
        }
        for &(a, b) in &self.edges {
            if !self.vertices.contains(&a) || !self.vertices.contains(&b) {
                return false;
            }
        }
        // Connectivity by BFS from the root.
        let mut seen = BTreeSet::from([self.root]);
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            for w in self.neighbors(v) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}

/// A full solution: one tree per robot with costs.
#[derive(Debug, Clone, Serialize)]
pub struct TreeCover {
    pub trees: Vec<Tree>,
    pub costs: Vec<f64>,
    pub makespan: f64,
}

impl TreeCover {
    /// Build from trees, computing costs from weight lookups.
    pub fn with_costs(
        trees: Vec<Tree>,
        vertex_weight: impl Fn(usize) -> f64,
        edge_weight: impl Fn(usize, usize) -> f64,
    ) -> Self {
        let costs: Vec<f64> = trees
            .iter()
            .map(|t| {
                let vw: f64 = t.vertices.iter().map(|&v| vertex_weight(v)).sum();
                let ew: f64 = t.edges.iter().map(|&(a, b)| edge_weight(a, b)).sum();
                vw + ew
            })
            .collect();
        let makespan = costs.iter().cloned().fold(0.0, f64::max);
        TreeCover { trees, costs, makespan }
    }

    /// How many trees contain each vertex id (0 for none).
    pub fn occurrences(&self, n_vertices: usize) -> Vec<usize> {
        let mut occ = vec![0usize; n_vertices];
        for t in &self.trees {
            for &v in &t.vertices {
                if v < n_vertices {
                    occ[v] += 1;
                }
            }
        }
        occ
    }
}

/// Validate a cover against an instance; returns costs and makespan.
pub fn validate_cover(inst: &MmrtcInstance, trees: &[Tree]) -> Result<TreeCover, MmrtcError> {
    let n = inst.n_vertices();
    if trees.len() != inst.n_robots() {
        return Err(MmrtcError::InvalidSolution(format!(
            "{} trees for {} robots",
            trees.len(),
            inst.n_robots()
        )));
    }
    let edge_set: std::collections::BTreeMap<(usize, usize), f64> = inst
        .edges
        .iter()
        .map(|&(u, v, w, _)| ((u, v), w))
        .collect();
    let mut covered = vec![false; n];
    for (i, t) in trees.iter().enumerate() {
        if t.root != inst.roots[i] {
            return Err(MmrtcError::InvalidSolution(format!(
                "tree {i} rooted at {} instead of {}",
                t.root, inst.roots[i]
            )));
        }
        if !t.is_valid() {
            return Err(MmrtcError::InvalidSolution(format!(
                "tree {i} is not a connected rooted tree"
            )));
        }
        for &(a, b) in &t.edges {
            if !edge_set.contains_key(&(a, b)) {
                return Err(MmrtcError::InvalidSolution(format!(
                    "tree {i} uses non-graph edge ({a}, {b})"
                )));
            }
        }
        for &v in &t.vertices {
            if v >= n {
                return Err(MmrtcError::InvalidSolution(format!(
                    "tree {i} contains unknown vertex {v}"
                )));
            }
            covered[v] = true;
        }
    }
    if let Some(v) = covered.iter().position(|c| !c) {
        return Err(MmrtcError::InvalidSolution(format!("vertex {v} is covered by no tree")));
    }
    Ok(TreeCover::with_costs(
        trees.to_vec(),
        |v| inst.weights[v],
        |a, b| edge_set[&(a.min(b), a.max(b))],
    ))
}

// ---------------------------------------------------------------------------
// MIP model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    /// (variable index, coefficient)
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Explicit mixed-integer program for one instance.
#[derive(Debug, Clone)]
pub struct MipModel {
    pub vars: Vec<Var>,
    pub constraints: Vec<Constraint>,
    /// (variable index, coefficient); minimized.
    pub objective: Vec<(usize, f64)>,
    /// y[v][i], x[e][i], flow endpoint vars, tau — indices into `vars`.
    pub y: Vec<Vec<usize>>,
    pub x: Vec<Vec<usize>>,
    pub f_u: Vec<Vec<usize>>,
    pub f_v: Vec<Vec<usize>>,
    pub tau: usize,
}

/// Build the MIP: minimize tau subject to per-robot makespan, coverage,
/// rootedness, tree cardinality, single-commodity flow acyclicity, and
/// edge-vertex linking.
pub fn build_model(inst: &MmrtcInstance) -> MipModel {
    let n = inst.n_vertices();
    let m = inst.edges.len();
    let k = inst.n_robots();
    let mut vars = Vec::new();
    let var = |name: String, kind: VarKind, vars: &mut Vec<Var>| -> usize {
        vars.push(Var { name, kind });
        vars.len() - 1
    };
    let y: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            (0..k)
                .map(|i| var(format!("y_{v}_{i}"), VarKind::Binary, &mut vars))
                .collect()
        })
        .collect();
    let x: Vec<Vec<usize>> = (0..m)
        .map(|e| {
            (0..k)
                .map(|i| var(format!("x_{e}_{i}"), VarKind::Binary, &mut vars))
                .collect()
        })
        .collect();
    let f_u: Vec<Vec<usize>> = (0..m)
        .map(|e| {
            (0..k)
                .map(|i| var(format!("f_{e}_u_{i}"), VarKind::Continuous, &mut vars))
                .collect()
        })
        .collect();
    let f_v: Vec<Vec<usize>> = (0..m)
        .map(|e| {
            (0..k)
                .map(|i| var(format!("f_{e}_v_{i}"), VarKind::Continuous, &mut vars))
                .collect()
        })
        .collect();
    let tau = var("tau".into(), VarKind::Continuous, &mut vars);

    let mut constraints = Vec::new();
    // Makespan: sum of selected vertex and edge weights stays below tau.
    for i in 0..k {
        let mut terms: Vec<(usize, f64)> =
            (0..n).map(|v| (y[v][i], inst.weights[v])).collect();
        for e in 0..m {
            if inst.edges[e].2 != 0.0 {
                terms.push((x[e][i], inst.edges[e].2));
            }
        }
        terms.push((tau, -1.0));
        constraints.push(Constraint { name: format!("mk_{i}"), terms, sense: Sense::Le, rhs: 0.0 });
    }
    // Coverage: every vertex in at least one tree.
    for v in 0..n {
        constraints.push(Constraint {
            name: format!("cov_{v}"),
            terms: (0..k).map(|i| (y[v][i], 1.0)).collect(),
            sense: Sense::Ge,
            rhs: 1.0,
        });
    }
    // Rootedness.
    for (i, &r) in inst.roots.iter().enumerate() {
        constraints.push(Constraint {
            name: format!("root_{i}"),
            terms: vec![(y[r][i], 1.0)],
            sense: Sense::Eq,
            rhs: 1.0,
        });
    }
    // Tree cardinality: |V_i| = 1 + |E_i|.
    for i in 0..k {
        let mut terms: Vec<(usize, f64)> = (0..n).map(|v| (y[v][i], 1.0)).collect();
        terms.extend((0..m).map(|e| (x[e][i], -1.0)));
        constraints.push(Constraint {
            name: format!("tree_{i}"),
            terms,
            sense: Sense::Eq,
            rhs: 1.0,
        });
    }
    // Flow acyclicity: each selected edge emits one unit split between its
    // endpoints, and each vertex absorbs strictly less than one unit.
    for e in 0..m {
        for i in 0..k {
            constraints.push(Constraint {
                name: format!("flow_{e}_{i}"),
                terms: vec![(f_u[e][i], 1.0), (f_v[e][i], 1.0), (x[e][i], -1.0)],
                sense: Sense::Eq,
                rhs: 0.0,
            });
        }
    }
    let cap = 1.0 - 1.0 / n as f64;
    for v in 0..n {
        for i in 0..k {
            let mut terms = Vec::new();
            for (e, &(a, b, _, _)) in inst.edges.iter().enumerate() {
                if a == v {
                    terms.push((f_u[e][i], 1.0));
                } else if b == v {
                    terms.push((f_v[e][i], 1.0));
                }
            }
            if terms.is_empty() {
                continue;
            }
            constraints.push(Constraint {
                name: format!("cap_{v}_{i}"),
                terms,
                sense: Sense::Le,
                rhs: cap,
            });
        }
    }
    // Linking: an edge is selected only if both endpoints are.
    for (e, &(a, b, _, _)) in inst.edges.iter().enumerate() {
        for i in 0..k {
            constraints.push(Constraint {
                name: format!("link_{e}_a_{i}"),
                terms: vec![(x[e][i], 1.0), (y[a][i], -1.0)],
                sense: Sense::Le,
                rhs: 0.0,
            });
            constraints.push(Constraint {
                name: format!("link_{e}_b_{i}"),
                terms: vec![(x[e][i], 1.0), (y[b][i], -1.0)],
                sense: Sense::Le,
                rhs: 0.0,
            });
        }
    }
    MipModel { vars, constraints, objective: vec![(tau, 1.0)], y, x, f_u, f_v, tau }
}

/// Check a full variable assignment against every constraint.
pub fn assignment_satisfies(model: &MipModel, values: &[f64]) -> Result<(), String> {
    for c in &model.constraints {
        let lhs: f64 = c.terms.iter().map(|&(v, coef)| coef * values[v]).sum();
        let ok = match c.sense {
            Sense::Le => lhs <= c.rhs + 1e-6,
            Sense::Ge => lhs >= c.rhs - 1e-6,
            Sense::Eq => (lhs - c.rhs).abs() <= 1e-6,
        };
        if !ok {
            return Err(format!("constraint {} violated: lhs {lhs}, rhs {}", c.name, c.rhs));
        }
    }
    Ok(())
}

/// Serialize the model in LP text format (CPLEX dialect).
pub fn write_lp(model: &MipModel, out: &mut impl std::io::Write) -> std::io::Result<()> {
    let fmt_terms = |terms: &[(usize, f64)]| -> String {
        let mut s = String::new();
        for (j, &(v, coef)) in terms.iter().enumerate() {
            let name = &model.vars[v].name;
            if j == 0 {
                if coef == 1.0 {
                    s.push_str(name);
                } else if coef == -1.0 {
                    s.push_str(&format!("- {name}"));
                } else {
                    s.push_str(&format!("{coef} {name}"));
                }
            } else if coef == 1.0 {
                s.push_str(&format!(" + {name}"));
            } else if coef == -1.0 {
                s.push_str(&format!(" - {name}"));
            } else if coef < 0.0 {
                s.push_str(&format!(" - {} {name}", -coef));
            } else {
                s.push_str(&format!(" + {coef} {name}"));
            }
        }
        s
    };
    writeln!(out, "Minimize")?;
    writeln!(out, " obj: {}", fmt_terms(&model.objective))?;
    writeln!(out, "Subject To")?;
    for c in &model.constraints {
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(out, " {}: {} {} {}", c.name, fmt_terms(&c.terms), op, c.rhs)?;
    }
    writeln!(out, "Binaries")?;
    let mut line = String::from(" ");
    for v in &model.vars {
        if v.kind != VarKind::Binary {
            continue;
        }
        if line.len() + v.name.len() > 200 {
            writeln!(out, "{line}")?;
            line = String::from(" ");
        }
        line.push_str(&v.name);
        line.push(' ');
    }
    if line.trim() != "" {
        writeln!(out, "{line}")?;
    }
    writeln!(out, "End")
}

/// Parse a `name value` per line solution file; `#` starts a comment.
pub fn read_solution(text: &str) -> std::collections::BTreeMap<String, f64> {
    let mut out = std::collections::BTreeMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        if let (Some(name), Some(value)) = (parts.next(), parts.next()) {
            if let Ok(v) = value.parse::<f64>() {
                out.insert(name.to_string(), v);
            }
        }
    }
    out
}

/// Turn binary variable values back into a validated tree cover.
pub fn decode(
    values: &std::collections::BTreeMap<String, f64>,
    model: &MipModel,
    inst: &MmrtcInstance,
) -> Result<TreeCover, MmrtcError> {
    let k = inst.n_robots();
    let lookup = |idx: usize| -> f64 {
        values.get(&model.vars[idx].name).cloned().unwrap_or(0.0)
    };
    let mut trees = Vec::with_capacity(k);
    for i in 0..k {
        let vertices: BTreeSet<usize> = (0..inst.n_vertices())
            .filter(|&v| lookup(model.y[v][i]) > 0.5)
            .collect();
        let edges: BTreeSet<(usize, usize)> = inst
            .edges
            .iter()
            .enumerate()
            .filter(|&(e, _)| lookup(model.x[e][i]) > 0.5)
            .map(|(_, &(u, v, _, _))| (u, v))
            .collect();
        trees.push(Tree { root: inst.roots[i], vertices, edges });
    }
    validate_cover(inst, &trees)
}

// ---------------------------------------------------------------------------
// Warm start
// ---------------------------------------------------------------------------

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        if self.0[x] != x {
            let r = self.find(self.0[x]);
            self.0[x] = r;
        }
        self.0[x]
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra] = rb;
        true
    }
}

/// Feasible initial cover: MST of the base graph, vertices assigned to the
/// hop-nearest root (ties to the lowest robot index), each tree closed under
/// the MST paths to its root.
pub fn warm_start(inst: &MmrtcInstance) -> Result<TreeCover, MmrtcError> {
    let n = inst.n_vertices();
    let k = inst.n_robots();
    // Kruskal over base edges; ties resolved by ascending endpoint ids.
    let mut order: Vec<usize> = (0..inst.edges.len())
        .filter(|&e| inst.edges[e].3)
        .collect();
    order.sort_by(|&a, &b| {
        let ea = &inst.edges[a];
        let eb = &inst.edges[b];
        ea.2.partial_cmp(&eb.2)
            .unwrap()
            .then(ea.0.cmp(&eb.0))
            .then(ea.1.cmp(&eb.1))
    });
    let mut dsu = Dsu::new(n);
    let mut mst_adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in order {
        let (u, v, _, _) = inst.edges[e];
        if dsu.union(u, v) {
            mst_adj[u].push(v);
            mst_adj[v].push(u);
        }
    }
    for adj in &mut mst_adj {
        adj.sort_unstable();
    }
    // Hop distances from each root through the MST.
    let bfs = |from: usize| -> Vec<u32> {
        let mut dist = vec![u32::MAX; n];
        dist[from] = 0;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &w in &mst_adj[v] {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    };
    let dist: Vec<Vec<u32>> = inst.roots.iter().map(|&r| bfs(r)).collect();
    let mut assigned: Vec<usize> = Vec::with_capacity(n);
    for v in 0..n {
        let mut best: Option<(u32, usize)> = None;
        for i in 0..k {
            let d = dist[i][v];
            if d == u32::MAX {
                continue;
            }
            if best.map(|(bd, _)| d < bd).unwrap_or(true) {
                best = Some((d, i));
            }
        }
        match best {
            Some((_, i)) => assigned.push(i),
            None => return Err(MmrtcError::UnreachableVertex(v)),
        }
    }
    // Each tree: union of MST paths from its assigned vertices to the root.
    let parent_towards = |root: usize| -> Vec<usize> {
        let mut parent = vec![usize::MAX; n];
        parent[root] = root;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &mst_adj[v] {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        parent
    };
    let mut trees = Vec::with_capacity(k);
    for (i, &r) in inst.roots.iter().enumerate() {
        let parent = parent_towards(r);
        let mut tree = Tree::singleton(r);
        for v in 0..n {
            if assigned[v] != i {
                continue;
            }
            let mut cur = v;
            while !tree.contains(cur) {
                tree.vertices.insert(cur);
                let p = parent[cur];
                tree.edges.insert((cur.min(p), cur.max(p)));
                cur = p;
            }
        }
        trees.push(tree);
    }
    validate_cover(inst, &trees)
}

// ---------------------------------------------------------------------------
// Bundled branch-and-bound
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Feasible,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub cover: TreeCover,
    pub status: SolveStatus,
    /// Incumbent makespans in the order they were found (non-increasing).
    pub incumbents: Vec<f64>,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone)]
pub enum Backend {
    Bundled,
    /// Command invoked as `<cmd> <model.lp> <solution_out>`.
    External(String),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub time_limit: f64,
    pub backend: Backend,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { time_limit: 60.0, backend: Backend::Bundled }
    }
}

/// Solve the instance, starting from (and never returning worse than) the
/// warm-start cover. `time_limit = 0` returns the warm start untouched.
pub fn solve(
    inst: &MmrtcInstance,
    warm: &TreeCover,
    opts: &SolveOptions,
) -> Result<SolveOutcome, MmrtcError> {
    if opts.time_limit == 0.0 {
        return Ok(SolveOutcome {
            cover: warm.clone(),
            status: SolveStatus::Feasible,
            incumbents: vec![warm.makespan],
            nodes_explored: 0,
        });
    }
    match &opts.backend {
        Backend::Bundled => branch_and_bound(inst, warm, opts.time_limit),
        Backend::External(cmd) => solve_external(inst, warm, cmd, opts.time_limit),
    }
}

/// Branch-and-bound node: membership masks for the first `level` vertices in
/// branch order.
struct BbNode {
    lb: f64,
    level: usize,
    masks: Vec<u8>,
    assigned: Vec<f64>,
    /// Pairs of same-root robots whose membership columns are still equal.
    same: u32,
    seq: u64,
}

impl PartialEq for BbNode {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl Eq for BbNode {}
impl Ord for BbNode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap is a max-heap; order so the smallest bound pops first,
        // diving deeper on ties, FIFO as the final tie-break.
        other
            .lb
            .partial_cmp(&self.lb)
            .unwrap()
            .then(self.level.cmp(&other.level))
            .then(other.seq.cmp(&self.seq))
    }
}
impl PartialOrd for BbNode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn branch_and_bound(
    inst: &MmrtcInstance,
    warm: &TreeCover,
    time_limit: f64,
) -> Result<SolveOutcome, MmrtcError> {
    let n = inst.n_vertices();
    let k = inst.n_robots();
    assert!(k <= 8, "bundled solver supports up to 8 robots");
    let adj = inst.adjacency();
    // Branch order: descending weight, ascending id on ties.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        inst.weights[b]
            .partial_cmp(&inst.weights[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut rank = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    // Forced membership bits: each root belongs to its robot's tree.
    let mut forced = vec![0u8; n];
    for (i, &r) in inst.roots.iter().enumerate() {
        forced[r] |= 1 << i;
    }
    // Suffix weight sums in branch order for the averaging bound.
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + inst.weights[order[i]];
    }
    // Same-root robot pairs for symmetry breaking.
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
        .filter(|&(i, j)| inst.roots[i] == inst.roots[j])
        .collect();
    assert!(pairs.len() <= 32);

    let start = Instant::now();
    let mut incumbent = warm.makespan;
    let mut best = warm.clone();
    let mut incumbents = vec![warm.makespan];
    let mut nodes: u64 = 0;
    let mut seq: u64 = 0;
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(BbNode {
        lb: suffix[0] / k as f64,
        level: 0,
        masks: Vec::new(),
        assigned: vec![0.0; k],
        same: (0..pairs.len() as u32).fold(0, |acc, i| acc | (1 << i)),
        seq,
    });
    let mut timed_out = false;
    let eps = 1e-9;

    while let Some(node) = heap.pop() {
        nodes += 1;
        if node.lb >= incumbent - eps {
            // Best-first: every remaining node is at least as bad.
            break;
        }
        if nodes % 256 == 0 && start.elapsed().as_secs_f64() > time_limit {
            timed_out = true;
            break;
        }
        if node.level == n {
            if let Some((cover, tau)) = finish_leaf(inst, &order, &node.masks) {
                if tau < incumbent - eps {
                    incumbent = tau;
                    best = cover;
                    incumbents.push(tau);
                }
            }
            continue;
        }
        let v = order[node.level];
        for mask in 1u8..(1 << k) {
            if mask & forced[v] != forced[v] {
                continue;
            }
            // Symmetry: same-root robots keep lexicographic membership order.
            let mut same = node.same;
            let mut sym_ok = true;
            for (pi, &(i, j)) in pairs.iter().enumerate() {
                if same & (1 << pi) == 0 {
                    continue;
                }
                let (bi, bj) = (mask >> i & 1, mask >> j & 1);
                if bj == 1 && bi == 0 {
                    sym_ok = false;
                    break;
                }
                if bi != bj {
                    same &= !(1 << pi);
                }
            }
            if !sym_ok {
                continue;
            }
            let mut assigned = node.assigned.clone();
            for i in 0..k {
                if mask >> i & 1 == 1 {
                    assigned[i] += inst.weights[v];
                }
            }
            let max_assigned = assigned.iter().cloned().fold(0.0, f64::max);
            // Averaging bound: unassigned weight must land somewhere.
            let total: f64 = assigned.iter().sum::<f64>() + suffix[node.level + 1];
            let lb = max_assigned.max(total / k as f64);
            if lb >= incumbent - eps {
                continue;
            }
            let mut masks = node.masks.clone();
            masks.push(mask);
            if !completable(inst, &adj, &order, &rank, &masks) {
                continue;
            }
            seq += 1;
            heap.push(BbNode { lb, level: node.level + 1, masks, assigned, same, seq });
        }
    }

    let status = if timed_out { SolveStatus::Feasible } else { SolveStatus::Optimal };
    Ok(SolveOutcome { cover: best, status, incumbents, nodes_explored: nodes })
}

/// Every vertex already assigned to robot `i` must still be connectable to
/// the root through vertices assigned to `i` or not yet decided.
fn completable(
    inst: &MmrtcInstance,
    adj: &[Vec<(usize, usize)>],
    order: &[usize],
    rank: &[usize],
    masks: &[u8],
) -> bool {
    let n = inst.n_vertices();
    let level = masks.len();
    let in_set = |v: usize, i: usize| -> bool {
        rank[v] >= level || masks[rank[v]] >> i & 1 == 1
    };
    for (i, &root) in inst.roots.iter().enumerate() {
        if !in_set(root, i) {
            return false;
        }
        let members: Vec<usize> = (0..level)
            .filter(|&t| masks[t] >> i & 1 == 1)
            .map(|t| order[t])
            .collect();
        if members.is_empty() {
            continue;
        }
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &(w, _) in &adj[v] {
                if !seen[w] && in_set(w, i) {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if members.iter().any(|&v| !seen[v]) {
            return false;
        }
    }
    true
}

/// Complete a full membership assignment into a cover: per robot, the induced
/// subgraph must be connected; the cheapest edge set is its MST.
fn finish_leaf(
    inst: &MmrtcInstance,
    order: &[usize],
    masks: &[u8],
) -> Option<(TreeCover, f64)> {
    let n = inst.n_vertices();
    let k = inst.n_robots();
    let mut member = vec![0u8; n];
    for (t, &mask) in masks.iter().enumerate() {
        member[order[t]] = mask;
    }
    if (0..n).any(|v| member[v] == 0) {
        return None;
    }
    let mut trees = Vec::with_capacity(k);
    for i in 0..k {
        let vertices: BTreeSet<usize> =
            (0..n).filter(|&v| member[v] >> i & 1 == 1).collect();
        // Kruskal restricted to the induced subgraph, cheapest edges first.
        let mut eids: Vec<usize> = (0..inst.edges.len())
            .filter(|&e| {
                let (u, v, _, _) = inst.edges[e];
                vertices.contains(&u) && vertices.contains(&v)
            })
            .collect();
        eids.sort_by(|&a, &b| {
            let (ea, eb) = (&inst.edges[a], &inst.edges[b]);
            ea.2.partial_cmp(&eb.2)
                .unwrap()
                .then(ea.0.cmp(&eb.0))
                .then(ea.1.cmp(&eb.1))
        });
        let index: std::collections::BTreeMap<usize, usize> =
            vertices.iter().cloned().enumerate().map(|(a, b)| (b, a)).collect();
        let mut dsu = Dsu::new(vertices.len());
        let mut edges = BTreeSet::new();
        for e in eids {
            let (u, v, _, _) = inst.edges[e];
            if dsu.union(index[&u], index[&v]) {
                edges.insert((u, v));
            }
        }
        if edges.len() + 1 != vertices.len() {
            return None; // induced subgraph disconnected
        }
        trees.push(Tree { root: inst.roots[i], vertices, edges });
    }
    let cover = validate_cover(inst, &trees).ok()?;
    let tau = cover.makespan;
    Some((cover, tau))
}

// ---------------------------------------------------------------------------
// External solver backend
// ---------------------------------------------------------------------------

fn solve_external(
    inst: &MmrtcInstance,
    warm: &TreeCover,
    cmd: &str,
    time_limit: f64,
) -> Result<SolveOutcome, MmrtcError> {
    let model = build_model(inst);
    let dir = std::env::temp_dir().join(format!("mmrtc_{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| MmrtcError::External(e.to_string()))?;
    let model_path = dir.join("model.lp");
    let sol_path = dir.join("solution.txt");
    let mut file =
        std::fs::File::create(&model_path).map_err(|e| MmrtcError::External(e.to_string()))?;
    write_lp(&model, &mut file).map_err(|e| MmrtcError::External(e.to_string()))?;
    drop(file);

    let mut parts = cmd.split_whitespace();
    let program = parts
        .next()
        .ok_or_else(|| MmrtcError::External("empty solver command".into()))?;
    let mut child = std::process::Command::new(program)
        .args(parts)
        .arg(&model_path)
        .arg(&sol_path)
        .spawn()
        .map_err(|e| MmrtcError::External(format!("failed to launch `{cmd}`: {e}")))?;
    let start = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                if start.elapsed().as_secs_f64() > time_limit {
                    let _ = child.kill();
                    let _ = child.wait();
                    // Fall back to the warm start on timeout.
                    return Ok(SolveOutcome {
                        cover: warm.clone(),
                        status: SolveStatus::Feasible,
                        incumbents: vec![warm.makespan],
                        nodes_explored: 0,
                    });
                }
                std::thread::sleep(std::time::Duration::from_millis(20));
            }
            Err(e) => return Err(MmrtcError::External(e.to_string())),
        }
    };
    if !status.success() {
        return Err(MmrtcError::External(format!("solver exited with {status}")));
    }
    let text =
        std::fs::read_to_string(&sol_path).map_err(|e| MmrtcError::External(e.to_string()))?;
    let values = read_solution(&text);
    let cover = decode(&values, &model, inst)?;
    // Never return a solution worse than the warm start.
    if cover.makespan > warm.makespan + 1e-9 {
        return Ok(SolveOutcome {
            cover: warm.clone(),
            status: SolveStatus::Feasible,
            incumbents: vec![warm.makespan],
            nodes_explored: 0,
        });
    }
    Ok(SolveOutcome {
        cover,
        status: SolveStatus::Feasible,
        incumbents: vec![warm.makespan],
        nodes_explored: 0,
    })
}
