//! Spiral stitching: turn one rooted tree of isolines into a single
//! continuous coverage path.
//!
//! The root isoline starts as a full counter-clockwise loop. Each tree child
//! is spliced into its parent at a stitching tuple (p, q): the parent pair
//! [p-1, p] is opened and the child's full loop is inserted between them,
//! traversed in the opposite direction so the two ends of the cut stay one
//! track apart. A tuple is usable only while its parent pair is still
//! adjacent in the path, so sibling and descendant splices never collide.
//! Shortcut edges route the jump through intermediate isolines via extra
//! travel points that are excluded from coverage accounting.

use crate::geom::Point2;
use crate::isograph::Isograph;
use crate::mmrtc::Tree;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum CfsError {
    #[error("tree edge ({u}, {v}) is not present in the graph")]
    MissingEdge { u: usize, v: usize },
    #[error("no usable stitching tuple for tree edge ({u}, {v})")]
    UnstitchableEdge { u: usize, v: usize },
    #[error("tree root {0} is not a graph vertex")]
    BadRoot(usize),
}

/// Where a path point came from: isoline vertex and point index. `via`
/// points are travel-only copies inserted to route a shortcut jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointSource {
    pub vertex: usize,
    pub index: usize,
    pub via: bool,
}

/// One robot's coverage path. The last point ends one track from the first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveragePath {
    pub robot: usize,
    pub points: Vec<Point2>,
    pub sources: Vec<PointSource>,
    pub closed: bool,
}

impl CoveragePath {
    /// Total geometric length, first to last point.
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    /// Largest distance between consecutive points.
    pub fn max_gap(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[0].dist(w[1]))
            .fold(0.0, f64::max)
    }

    /// Distance between the path's two endpoints.
    pub fn entry_exit_distance(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => a.dist(*b),
            _ => 0.0,
        }
    }
}

/// Unsigned discrete curvature at `b`: turning angle between the incoming
/// and outgoing segments divided by their mean length. `None` when either
/// segment is degenerate.
pub fn curvature_of_triple(a: Point2, b: Point2, c: Point2) -> Option<f64> {
    let d1 = b - a;
    let d2 = c - b;
    let l1 = d1.x.hypot(d1.y);
    let l2 = d2.x.hypot(d2.y);
    if l1 < 1e-12 || l2 < 1e-12 {
        return None;
    }
    let cross = d1.x * d2.y - d1.y * d2.x;
    let dot = d1.x * d2.x + d1.y * d2.y;
    let angle = cross.abs().atan2(dot);
    Some(angle / (0.5 * (l1 + l2)))
}

/// Mean discrete curvature over a path's interior points.
pub fn mean_curvature(points: &[Point2]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for w in points.windows(3) {
        if let Some(k) = curvature_of_triple(w[0], w[1], w[2]) {
            sum += k;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

// ---------------------------------------------------------------------------
// Stitch point selection
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    /// Uniform random usable tuple.
    Random,
    /// Continue one index past the point where the parent loop was entered.
    Cfs,
    /// Minimize the extra curvature the splice introduces at its corners.
    Mcs,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SelectorConfig {
    pub kind: SelectorKind,
    pub seed: u64,
    /// Invert the curvature criterion (pick the worst splice instead).
    pub mcs_argmax: bool,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig { kind: SelectorKind::Cfs, seed: 0, mcs_argmax: false }
    }
}

/// A usable splice site for one tree edge, oriented parent-to-child.
#[derive(Debug, Clone)]
pub struct Candidate {
    /// Point index on the parent isoline.
    pub p: usize,
    /// Point index on the child isoline.
    pub q: usize,
    /// True when the path runs [p-1, p] at the site; false for [p, p-1].
    pub forward: bool,
    /// Splice position in the path (insertion happens before it).
    pos: usize,
    /// Travel points on intermediate isolines for shortcut edges.
    pub chain: Vec<(usize, usize)>,
}

/// Per-robot stitch point chooser.
#[derive(Debug, Clone)]
pub struct Selector {
    kind: SelectorKind,
    mcs_argmax: bool,
    rng: ChaCha8Rng,
    /// Curvature score of the most recent choice, when the criterion ran.
    pub last_score: Option<f64>,
}

impl Selector {
    pub fn new(cfg: &SelectorConfig, robot: usize) -> Self {
        Selector {
            kind: cfg.kind,
            mcs_argmax: cfg.mcs_argmax,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(robot as u64)),
            last_score: None,
        }
    }

    /// Choose among candidates (sorted by (p, q)); `entry_q` is the parent
    /// loop's own entry index, if the parent was itself spliced.
    pub fn pick(
        &mut self,
        g: &Isograph,
        parent: usize,
        child: usize,
        cands: &[Candidate],
        entry_q: Option<usize>,
    ) -> usize {
        debug_assert!(!cands.is_empty());
        match self.kind {
            SelectorKind::Random => self.rng.gen_range(0..cands.len()),
            SelectorKind::Cfs => {
                let n = g.isoline(parent).len();
                entry_q
                    .and_then(|qp| {
                        let target = (qp + 1) % n;
                        cands.iter().position(|c| c.p == target)
                    })
                    .unwrap_or(0)
            }
            SelectorKind::Mcs => {
                let mut best = 0usize;
                let mut best_score = f64::INFINITY * if self.mcs_argmax { -1.0 } else { 1.0 };
                for (i, c) in cands.iter().enumerate() {
                    let s = mcs_score(g, parent, child, c.p, c.q);
                    let better =
                        if self.mcs_argmax { s > best_score } else { s < best_score };
                    if better {
                        best = i;
                        best_score = s;
                    }
                }
                self.last_score = Some(best_score);
                best
            }
        }
    }
}

/// Curvature cost of splicing at (p, q): mean discrete curvature at the four
/// splice corners after the cut, minus the same points' curvature along
/// their own isolines.
pub fn mcs_score(g: &Isograph, parent: usize, child: usize, p: usize, q: usize) -> f64 {
    let iu = g.isoline(parent);
    let iv = g.isoline(child);
    let pu = |i: usize| iu.point(i % iu.len());
    let pv = |i: usize| iv.point(i % iv.len());
    let (nu, nv) = (iu.len(), iv.len());
    let k = |a, b, c| curvature_of_triple(a, b, c).unwrap_or(1e9);
    // Post-splice neighborhoods: ..., p-2, p-1, q-1, q-2 ... q+1, q, p, p+1.
    let post = [
        k(pu(p + nu - 2), pu(p + nu - 1), pv(q + nv - 1)),
        k(pu(p + nu - 1), pv(q + nv - 1), pv(q + nv - 2)),
        k(pv(q + 1), pv(q), pu(p)),
        k(pv(q), pu(p), pu(p + 1)),
    ];
    let base = [
        k(pu(p + nu - 2), pu(p + nu - 1), pu(p)),
        k(pv(q + nv - 2), pv(q + nv - 1), pv(q)),
        k(pv(q + 1), pv(q), pv(q + nv - 1)),
        k(pu(p + nu - 1), pu(p), pu(p + 1)),
    ];
    (post.iter().sum::<f64>() - base.iter().sum::<f64>()) / 4.0
}

// ---------------------------------------------------------------------------
// Stitching engine
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Entry {
    v: usize,
    idx: usize,
    via: bool,
}

/// Stitch a rooted tree of isolines into one coverage path.
///
/// Children are visited in depth-first preorder, ascending id; if some edge
/// runs out of usable tuples the whole stitch is retried once with children
/// in descending order.
pub fn unified_cfs(
    g: &Isograph,
    tree: &Tree,
    robot: usize,
    cfg: &SelectorConfig,
) -> Result<CoveragePath, CfsError> {
    match attempt(g, tree, robot, cfg, false) {
        Ok(path) => Ok(path),
        Err(CfsError::UnstitchableEdge { .. }) => attempt(g, tree, robot, cfg, true),
        Err(e) => Err(e),
    }
}

fn attempt(
    g: &Isograph,
    tree: &Tree,
    robot: usize,
    cfg: &SelectorConfig,
    reverse_children: bool,
) -> Result<CoveragePath, CfsError> {
    if tree.root >= g.vertices.len() {
        return Err(CfsError::BadRoot(tree.root));
    }
    let mut selector = Selector::new(cfg, robot);
    let root_len = g.isoline(tree.root).len();
    let mut path: Vec<Entry> = (0..root_len)
        .map(|idx| Entry { v: tree.root, idx, via: false })
        .collect();
    dfs(g, tree, &mut path, &mut selector, tree.root, usize::MAX, None, reverse_children)?;

    // Start the emitted path at the root isoline's first point.
    let start = path
        .iter()
        .position(|e| e.v == tree.root && e.idx == 0 && !e.via)
        .expect("root point 0 present");
    path.rotate_left(start);
    let sources: Vec<PointSource> = path
        .iter()
        .map(|e| PointSource { vertex: e.v, index: e.idx, via: e.via })
        .collect();
    let points: Vec<Point2> = path.iter().map(|e| g.isoline(e.v).point(e.idx)).collect();
    Ok(CoveragePath { robot, points, sources, closed: true })
}

/// Depth-first preorder: splice a child, finish its whole subtree, then move
/// to the next sibling.
#[allow(clippy::too_many_arguments)]
fn dfs(
    g: &Isograph,
    tree: &Tree,
    path: &mut Vec<Entry>,
    selector: &mut Selector,
    v: usize,
    parent: usize,
    entry_q: Option<usize>,
    reverse_children: bool,
) -> Result<(), CfsError> {
    let mut children: Vec<usize> = tree
        .neighbors(v)
        .into_iter()
        .filter(|&c| c != parent)
        .collect();
    if reverse_children {
        children.reverse();
    }
    for c in children {
        let q = splice_child(g, path, v, c, entry_q, selector)?;
        dfs(g, tree, path, selector, c, v, Some(q), reverse_children)?;
    }
    Ok(())
}

/// Splice child `c`'s full loop into the path at a selected tuple of the
/// tree edge (v, c); returns the child-side entry index q.
fn splice_child(
    g: &Isograph,
    path: &mut Vec<Entry>,
    v: usize,
    c: usize,
    entry_q: Option<usize>,
    selector: &mut Selector,
) -> Result<usize, CfsError> {
    let edge = g
        .edge_between(v, c)
        .ok_or(CfsError::MissingEdge { u: v, v: c })?;
    // Orient tuples parent-to-child.
    let mut oriented: Vec<(usize, usize, Vec<(usize, usize)>)> = Vec::new();
    let interior: &[usize] = if edge.via_path.len() >= 3 {
        &edge.via_path[1..edge.via_path.len() - 1]
    } else {
        &[]
    };
    for (t, tuple) in edge.tuples.iter().enumerate() {
        let chain_pts: Vec<(usize, usize)> = edge
            .tuple_chains
            .get(t)
            .map(|chain| interior.iter().zip(chain).map(|(&w, &i)| (w, i)).collect())
            .unwrap_or_default();
        if tuple.u == v {
            oriented.push((tuple.p_index, tuple.q_index, chain_pts));
        } else {
            let rev: Vec<(usize, usize)> = chain_pts.into_iter().rev().collect();
            oriented.push((tuple.q_index, tuple.p_index, rev));
        }
    }
    oriented.sort_by_key(|&(p, q, _)| (p, q));

    let cands = usable_candidates(g, path, v, &oriented);
    let cands = if !cands.is_empty() {
        cands
    } else if edge.tuples.is_empty() {
        nearest_pair_candidates(g, path, v, c)
    } else {
        Vec::new()
    };
    if cands.is_empty() {
        return Err(CfsError::UnstitchableEdge { u: v, v: c });
    }
    let chosen = selector.pick(g, v, c, &cands, entry_q);
    let cand = cands[chosen].clone();
    insert_block(g, path, v, c, &cand);
    Ok(cand.q)
}

/// Filter oriented tuples to those whose parent pair [p-1, p] is still
/// adjacent in the path (in either direction).
fn usable_candidates(
    g: &Isograph,
    path: &[Entry],
    parent: usize,
    oriented: &[(usize, usize, Vec<(usize, usize)>)],
) -> Vec<Candidate> {
    let n = g.isoline(parent).len();
    let positions = position_map(path, parent);
    let len = path.len();
    let mut out = Vec::new();
    for &(p, q, ref chain) in oriented {
        let b = (p + n - 1) % n;
        let (pos_p, pos_b) = match (positions.get(&p), positions.get(&b)) {
            (Some(&a), Some(&c)) => (a, c),
            _ => continue,
        };
        if (pos_b + 1) % len == pos_p {
            out.push(Candidate { p, q, forward: true, pos: pos_p, chain: chain.clone() });
        } else if (pos_p + 1) % len == pos_b {
            out.push(Candidate { p, q, forward: false, pos: pos_b, chain: chain.clone() });
        }
    }
    out
}

/// Positions of a vertex's coverage points in the path (via copies ignored).
fn position_map(path: &[Entry], vertex: usize) -> BTreeMap<usize, usize> {
    path.iter()
        .enumerate()
        .filter(|(_, e)| e.v == vertex && !e.via)
        .map(|(pos, e)| (e.idx, pos))
        .collect()
}

/// For edges that carry no tuples: every intact parent pair, matched with
/// the nearest child point, cheapest jump first.
fn nearest_pair_candidates(
    g: &Isograph,
    path: &[Entry],
    parent: usize,
    child: usize,
) -> Vec<Candidate> {
    let iu = g.isoline(parent);
    let iv = g.isoline(child);
    let n = iu.len();
    let positions = position_map(path, parent);
    let len = path.len();
    let mut best: Option<(f64, Candidate)> = None;
    for p in 0..n {
        let b = (p + n - 1) % n;
        let (pos_p, pos_b) = match (positions.get(&p), positions.get(&b)) {
            (Some(&a), Some(&c)) => (a, c),
            _ => continue,
        };
        let forward = if (pos_b + 1) % len == pos_p {
            true
        } else if (pos_p + 1) % len == pos_b {
            false
        } else {
            continue;
        };
        let q = crate::isograph::nearest_point_index(&iv.points, iu.point(p));
        let d = iu.point(p).dist(iv.point(q));
        let pos = if forward { pos_p } else { pos_b };
        let cand = Candidate { p, q, forward, pos, chain: Vec::new() };
        if best.as_ref().map(|(bd, _)| d < *bd).unwrap_or(true) {
            best = Some((d, cand));
        }
    }
    best.map(|(_, c)| vec![c]).unwrap_or_default()
}

/// Insert the child's full loop (plus any shortcut travel points) at the
/// candidate site. The loop runs in whichever rotational direction keeps
/// both doorway jumps short; contours around holes wind against their
/// neighbors, so the direction cannot be fixed from the parent's alone.
fn insert_block(g: &Isograph, path: &mut Vec<Entry>, parent: usize, child: usize, cand: &Candidate) {
    let iu = g.isoline(parent);
    let iv = g.isoline(child);
    let (nu, nv) = (iu.len(), iv.len());
    let q = cand.q;
    let b = (cand.p + nu - 1) % nu;
    // Parent points flanking the insertion slot, in path order.
    let (before, after) = if cand.forward {
        (iu.point(b), iu.point(cand.p)) // ..., p-1 | block | p, ...
    } else {
        (iu.point(cand.p), iu.point(b)) // ..., p | block | p-1, ...
    };
    let cq = iv.point(q);
    let cb = iv.point((q + nv - 1) % nv);
    // Descending enters at q-1 and exits at q; ascending the reverse.
    let desc_cost = before.dist(cb).max(cq.dist(after));
    let asc_cost = before.dist(cq).max(cb.dist(after));
    let descending =
        if desc_cost == asc_cost { cand.forward } else { desc_cost < asc_cost };

    let mut block: Vec<Entry> = Vec::with_capacity(nv + 2 * cand.chain.len());
    if descending {
        // before | c1-1, ..., cm-1, q-1, q-2, ..., q, cm, ..., c1 | after
        for &(w, i) in &cand.chain {
            let nw = g.isoline(w).len();
            block.push(Entry { v: w, idx: (i + nw - 1) % nw, via: true });
        }
        for t in 0..nv {
            block.push(Entry { v: child, idx: (q + nv - 1 - t) % nv, via: false });
        }
        for &(w, i) in cand.chain.iter().rev() {
            block.push(Entry { v: w, idx: i, via: true });
        }
    } else {
        // before | c1, ..., cm, q, q+1, ..., q-1, cm-1, ..., c1-1 | after
        for &(w, i) in &cand.chain {
            block.push(Entry { v: w, idx: i, via: true });
        }
        for t in 0..nv {
            block.push(Entry { v: child, idx: (q + t) % nv, via: false });
        }
        for &(w, i) in cand.chain.iter().rev() {
            let nw = g.isoline(w).len();
            block.push(Entry { v: w, idx: (i + nw - 1) % nw, via: true });
        }
    }
    path.splice(cand.pos..cand.pos, block);
}
