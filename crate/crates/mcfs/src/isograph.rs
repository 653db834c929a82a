//! Isograph construction: isolines become vertices, stitching tuples become
//! edges.
//!
//! A vertex's weight is its point count. Two isolines on adjacent layers are
//! connected when they admit at least one stitching tuple: a mutually nearest
//! pair of resampled points whose surroundings agree that the other isoline
//! is the closest one on its layer. Augmentation adds shortcut edges between
//! layers further apart by chaining tuples through intermediate isolines.

use crate::geom::{point_ring_distance, segments_intersect, Isoline, Point2, Workspace};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum IsographError {
    #[error("augmentation radius delta must be at least 2, got {0}")]
    InvalidDelta(u32),
    #[error("no isolines to build a graph from")]
    Empty,
}

/// Graph vertex: one isoline plus its identity.
#[derive(Debug, Clone)]
pub struct Isovertex {
    pub id: usize,
    pub isoline: Isoline,
}

impl Isovertex {
    /// Vertex weight: the number of resampled points the robot must visit.
    pub fn weight(&self) -> f64 {
        self.isoline.len() as f64
    }

    pub fn layer(&self) -> u32 {
        self.isoline.layer
    }
}

/// Mutually nearest point pair joining isolines `u` and `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StitchingTuple {
    pub u: usize,
    pub v: usize,
    /// Point index on `u`'s isoline.
    pub p_index: usize,
    /// Point index on `v`'s isoline.
    pub q_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    /// Adjacent layers, weight 0.
    Original,
    /// Shortcut between layers 2..=delta apart, weight `step * layer_diff`.
    Augmented,
    /// Same-layer connector between disconnected components (optional mode).
    Bridge,
    /// Edge incident to a vertex created by pairwise isoline splitting.
    Split,
}

/// Graph edge with the stitching tuples that realize it.
#[derive(Debug, Clone)]
pub struct IsoEdge {
    pub u: usize,
    pub v: usize,
    pub kind: EdgeKind,
    /// Length penalty added to a tree that uses this edge.
    pub weight: f64,
    pub tuples: Vec<StitchingTuple>,
    /// For augmented edges: the vertex path the shortcut follows.
    pub via_path: Vec<usize>,
    /// For augmented edges: per tuple, the intermediate point index on each
    /// interior vertex of `via_path` (used to route the stitch jump).
    pub tuple_chains: Vec<Vec<usize>>,
}

impl IsoEdge {
    pub fn other(&self, vertex: usize) -> usize {
        if self.u == vertex {
            self.v
        } else {
            self.u
        }
    }
}

/// Weighted graph over isolines.
#[derive(Debug, Clone)]
pub struct Isograph {
    pub vertices: Vec<Isovertex>,
    pub edges: Vec<IsoEdge>,
    /// Layer separation used to weight augmented edges.
    pub step: f64,
    /// Edge indices incident to each vertex.
    adjacency: Vec<Vec<usize>>,
    pub connected: bool,
}

impl Isograph {
    pub fn vertex(&self, id: usize) -> &Isovertex {
        &self.vertices[id]
    }

    pub fn isoline(&self, id: usize) -> &Isoline {
        &self.vertices[id].isoline
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<&IsoEdge> {
        self.adjacency[u]
            .iter()
            .map(|&e| &self.edges[e])
            .find(|e| e.other(u) == v)
    }

    pub fn incident_edges(&self, v: usize) -> impl Iterator<Item = &IsoEdge> {
        self.adjacency[v].iter().map(|&e| &self.edges[e])
    }

    /// Neighbor ids of `v`, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.adjacency[v]
            .iter()
            .map(|&e| self.edges[e].other(v))
            .collect();
        out.sort_unstable();
        out
    }

    /// Rebuild a graph from explicit vertices and edges.
    pub fn from_parts(vertices: Vec<Isovertex>, edges: Vec<IsoEdge>, step: f64) -> Self {
        let mut g = Isograph {
            adjacency: vec![Vec::new(); vertices.len()],
            vertices,
            edges: Vec::new(),
            step,
            connected: true,
        };
        for edge in edges {
            g.push_edge(edge);
        }
        g.rebuild_connectivity();
        g
    }

    /// Append a vertex (used by refinement when isolines are split).
    pub fn push_vertex(&mut self, isoline: Isoline) -> usize {
        let id = self.vertices.len();
        self.vertices.push(Isovertex { id, isoline });
        self.adjacency.push(Vec::new());
        id
    }

    /// Append an edge and index it.
    pub fn push_edge(&mut self, edge: IsoEdge) -> usize {
        let idx = self.edges.len();
        self.adjacency[edge.u].push(idx);
        self.adjacency[edge.v].push(idx);
        self.edges.push(edge);
        idx
    }

    fn rebuild_connectivity(&mut self) {
        self.connected = {
            let n = self.vertices.len();
            if n == 0 {
                true
            } else {
                let mut seen = vec![false; n];
                let mut stack = vec![0usize];
                seen[0] = true;
                while let Some(v) = stack.pop() {
                    for e in &self.adjacency[v] {
                        let w = self.edges[*e].other(v);
                        if !seen[w] {
                            seen[w] = true;
                            stack.push(w);
                        }
                    }
                }
                seen.into_iter().all(|s| s)
            }
        };
    }

    /// Graph distances from `from` counting only base (non-augmented) edges.
    fn base_distances(&self, from: usize) -> Vec<u32> {
        let n = self.vertices.len();
        let mut dist = vec![u32::MAX; n];
        dist[from] = 0;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.adjacency[v] {
                let edge = &self.edges[e];
                if edge.kind == EdgeKind::Augmented {
                    continue;
                }
                let w = edge.other(v);
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Index of the point on `points` nearest to `p`; ties go to the lowest index.
pub fn nearest_point_index(points: &[Point2], p: Point2) -> usize {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (i, q) in points.iter().enumerate() {
        let d = p.dist(*q);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Point indices on `u`'s isoline that are strictly closer to `v`'s isoline
/// than to any other isoline on `v`'s layer. Ties exclude the point.
pub fn connecting_segment_set(u: &Isovertex, v: &Isovertex, all: &[Isovertex]) -> Vec<usize> {
    let mates: Vec<&Isovertex> = all
        .iter()
        .filter(|z| z.id != v.id && z.layer() == v.layer())
        .collect();
    let mut out = Vec::new();
    for (i, p) in u.isoline.points.iter().enumerate() {
        let dv = point_ring_distance(*p, &v.isoline.points);
        if mates
            .iter()
            .all(|z| dv < point_ring_distance(*p, &z.isoline.points))
        {
            out.push(i);
        }
    }
    out
}

/// All stitching tuples between `u` and `v`: pairs from the two connecting
/// segment sets that are mutually nearest, sorted by `p_index`.
pub fn stitching_tuples(u: &Isovertex, v: &Isovertex, all: &[Isovertex]) -> Vec<StitchingTuple> {
    debug_assert_eq!(
        (u.layer() as i64 - v.layer() as i64).abs(),
        1,
        "stitching tuples are defined between adjacent layers"
    );
    let o_uv = connecting_segment_set(u, v, all);
    let o_vu = connecting_segment_set(v, u, all);
    let in_o_vu: std::collections::BTreeSet<usize> = o_vu.iter().cloned().collect();
    let mut out = Vec::new();
    for &p in &o_uv {
        let q = nearest_point_index(&v.isoline.points, u.isoline.points[p]);
        if !in_o_vu.contains(&q) {
            continue;
        }
        let back = nearest_point_index(&u.isoline.points, v.isoline.points[q]);
        if back == p {
            out.push(StitchingTuple { u: u.id, v: v.id, p_index: p, q_index: q });
        }
    }
    out
}

/// Build the isograph over `isolines` with layer separation `step`.
///
/// Vertex ids are assigned after sorting by (layer, lexicographic first
/// point); edges join adjacent-layer pairs with a nonempty tuple set.
pub fn build_isograph(isolines: Vec<Isoline>, step: f64) -> Result<Isograph, IsographError> {
    if isolines.is_empty() {
        return Err(IsographError::Empty);
    }
    let mut sorted = isolines;
    sorted.sort_by(|a, b| {
        a.layer
            .cmp(&b.layer)
            .then_with(|| a.first_point().lex_cmp(b.first_point()))
    });
    let vertices: Vec<Isovertex> = sorted
        .into_iter()
        .enumerate()
        .map(|(id, isoline)| Isovertex { id, isoline })
        .collect();
    let n = vertices.len();
    let mut g = Isograph {
        vertices,
        edges: Vec::new(),
        step,
        adjacency: vec![Vec::new(); n],
        connected: false,
    };
    for u in 0..n {
        for v in (u + 1)..n {
            let (lu, lv) = (g.vertices[u].layer(), g.vertices[v].layer());
            if lu.abs_diff(lv) != 1 {
                continue;
            }
            let tuples = stitching_tuples(&g.vertices[u], &g.vertices[v], &g.vertices);
            if tuples.is_empty() {
                continue;
            }
            g.push_edge(IsoEdge {
                u,
                v,
                kind: EdgeKind::Original,
                weight: 0.0,
                tuples,
                via_path: Vec::new(),
                tuple_chains: Vec::new(),
            });
        }
    }
    g.rebuild_connectivity();
    Ok(g)
}

/// Add shortcut edges between vertices at base-graph distance `2..=delta`.
///
/// A shortcut carries the tuple pairs reachable by chaining stitching tuples
/// along the (lexicographically smallest) shortest path, filtered by a
/// straight-segment test: the jump must not cross the workspace boundary and
/// may cross at most `path_len - 1` other isolines. Repeated augmentation
/// with the same `delta` is a no-op.
pub fn augment(g: &Isograph, delta: u32, ws: &Workspace) -> Result<Isograph, IsographError> {
    if delta < 2 {
        return Err(IsographError::InvalidDelta(delta));
    }
    let mut out = g.clone();
    let n = g.vertices.len();
    let existing: std::collections::BTreeSet<(usize, usize)> =
        g.edges.iter().map(|e| (e.u.min(e.v), e.u.max(e.v))).collect();
    for u in 0..n {
        let dist = g.base_distances(u);
        for v in (u + 1)..n {
            if dist[v] < 2 || dist[v] > delta || dist[v] == u32::MAX {
                continue;
            }
            if existing.contains(&(u, v)) {
                continue;
            }
            let path = lex_smallest_shortest_path(g, u, v, &dist);
            let (tuples, chains) = chain_tuples(g, &path, ws);
            if tuples.is_empty() {
                continue;
            }
            let layer_diff = g.vertices[u].layer().abs_diff(g.vertices[v].layer());
            out.push_edge(IsoEdge {
                u,
                v,
                kind: EdgeKind::Augmented,
                weight: g.step * layer_diff as f64,
                tuples,
                via_path: path,
                tuple_chains: chains,
            });
        }
    }
    out.rebuild_connectivity();
    Ok(out)
}

/// Walk from `u` to `v` always picking the smallest-id neighbor that moves
/// one step closer; `dist` holds base-graph distances from `u`.
fn lex_smallest_shortest_path(g: &Isograph, u: usize, v: usize, dist: &[u32]) -> Vec<usize> {
    // Distances measured from v let the walk from u be greedy.
    let dist_v = g.base_distances(v);
    let mut path = vec![u];
    let mut cur = u;
    let _ = dist;
    while cur != v {
        let next = g
            .neighbors(cur)
            .into_iter()
            .filter(|&w| {
                g.edge_between(cur, w).map(|e| e.kind != EdgeKind::Augmented) == Some(true)
                    && dist_v[w] != u32::MAX
                    && dist_v[w] + 1 == dist_v[cur]
            })
            .min()
            .expect("shortest path step exists");
        path.push(next);
        cur = next;
    }
    path
}

/// Compose tuple chains along `path`, then keep pairs whose straight jump
/// stays inside the workspace and crosses at most `path.len() - 2` isolines.
fn chain_tuples(
    g: &Isograph,
    path: &[usize],
    ws: &Workspace,
) -> (Vec<StitchingTuple>, Vec<Vec<usize>>) {
    let (first, last) = (path[0], *path.last().unwrap());
    // (start point on path[0], current point on path[i], intermediates)
    let mut states: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for (hop, win) in path.windows(2).enumerate() {
        let (a, b) = (win[0], win[1]);
        let edge = match g.edge_between(a, b) {
            Some(e) => e,
            None => return (Vec::new(), Vec::new()),
        };
        let oriented: Vec<(usize, usize)> = edge
            .tuples
            .iter()
            .map(|t| {
                if t.u == a {
                    (t.p_index, t.q_index)
                } else {
                    (t.q_index, t.p_index)
                }
            })
            .collect();
        if hop == 0 {
            states = oriented.iter().map(|&(p, q)| (p, q, Vec::new())).collect();
        } else {
            let mut next = Vec::new();
            for (start, cur, chain) in &states {
                for &(p, q) in &oriented {
                    if p == *cur {
                        let mut c = chain.clone();
                        c.push(*cur);
                        next.push((*start, q, c));
                    }
                }
            }
            states = next;
        }
        if states.is_empty() {
            return (Vec::new(), Vec::new());
        }
    }
    // One chain per endpoint pair, first in composition order wins.
    let mut seen = std::collections::BTreeSet::new();
    let mut tuples = Vec::new();
    let mut chains = Vec::new();
    let max_crossings = path.len() - 2;
    for (start, end, chain) in states {
        if !seen.insert((start, end)) {
            continue;
        }
        let a = g.isoline(first).point(start);
        let b = g.isoline(last).point(end);
        if !jump_admissible(g, ws, a, b, first, last, max_crossings) {
            continue;
        }
        tuples.push(StitchingTuple { u: first, v: last, p_index: start, q_index: end });
        chains.push(chain);
    }
    let mut order: Vec<usize> = (0..tuples.len()).collect();
    order.sort_by_key(|&i| (tuples[i].p_index, tuples[i].q_index));
    (
        order.iter().map(|&i| tuples[i]).collect(),
        order.iter().map(|&i| chains[i].clone()).collect(),
    )
}

/// Straight segment a-b must avoid the workspace boundary entirely and cross
/// at most `max_crossings` isolines other than its own endpoints'.
fn jump_admissible(
    g: &Isograph,
    ws: &Workspace,
    a: Point2,
    b: Point2,
    skip_u: usize,
    skip_v: usize,
    max_crossings: usize,
) -> bool {
    for ring in ws.rings() {
        if segment_crosses_ring(a, b, ring, 0.0) {
            return false;
        }
    }
    let mut crossed = 0usize;
    for vertex in &g.vertices {
        if vertex.id == skip_u || vertex.id == skip_v {
            continue;
        }
        // Ignore grazes right at the jump endpoints.
        if segment_crosses_ring(a, b, &vertex.isoline.points, 1e-9) {
            crossed += 1;
            if crossed > max_crossings {
                return false;
            }
        }
    }
    true
}

fn segment_crosses_ring(a: Point2, b: Point2, ring: &[Point2], endpoint_eps: f64) -> bool {
    let n = ring.len();
    let len = a.dist(b);
    for i in 0..n {
        let (c, d) = (ring[i], ring[(i + 1) % n]);
        if !segments_intersect(a, b, c, d) {
            continue;
        }
        if endpoint_eps > 0.0 && len > 0.0 {
            // Skip intersections essentially at the segment endpoints.
            let near_end = crate::geom::point_segment_distance(a, c, d) < endpoint_eps * len
                || crate::geom::point_segment_distance(b, c, d) < endpoint_eps * len;
            if near_end {
                continue;
            }
        }
        return true;
    }
    false
}

/// Connect components with same-layer bridge edges (optional mode).
///
/// Repeatedly joins the closest same-layer isoline pair from different
/// components; each bridge carries the single nearest point pair as its only
/// tuple and the pair distance as its weight.
pub fn bridge_components(g: &mut Isograph) {
    loop {
        let comp = components(g);
        let n_comp = comp.iter().cloned().max().map(|m| m + 1).unwrap_or(0);
        if n_comp <= 1 {
            break;
        }
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for u in 0..g.vertices.len() {
            for v in (u + 1)..g.vertices.len() {
                if comp[u] == comp[v] || g.vertices[u].layer() != g.vertices[v].layer() {
                    continue;
                }
                for (pi, p) in g.vertices[u].isoline.points.iter().enumerate() {
                    for (qi, q) in g.vertices[v].isoline.points.iter().enumerate() {
                        let d = p.dist(*q);
                        if best.map(|b| d < b.0).unwrap_or(true) {
                            best = Some((d, u, v, pi, qi));
                        }
                    }
                }
            }
        }
        match best {
            Some((d, u, v, pi, qi)) => {
                g.push_edge(IsoEdge {
                    u,
                    v,
                    kind: EdgeKind::Bridge,
                    weight: d,
                    tuples: vec![StitchingTuple { u, v, p_index: pi, q_index: qi }],
                    via_path: Vec::new(),
                    tuple_chains: Vec::new(),
                });
            }
            None => break, // no same-layer pair left to join
        }
    }
    g.rebuild_connectivity();
}

fn components(g: &Isograph) -> Vec<usize> {
    let n = g.vertices.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0usize;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &e in &g.adjacency[v] {
                let w = g.edges[e].other(v);
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{build_distance_field, extract_isolines, Workspace};

    fn circle(center: Point2, r: f64, spacing: f64, layer: u32) -> Isoline {
        let n = ((2.0 * std::f64::consts::PI * r / spacing).round() as usize).max(3);
        let points = (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Point2::new(center.x + r * a.cos(), center.y + r * a.sin())
            })
            .collect();
        Isoline { layer, points, spacing }
    }

    fn two_circles() -> Vec<Isovertex> {
        let outer = circle(Point2::new(0.0, 0.0), 0.7, 0.1, 1);
        let inner = circle(Point2::new(0.0, 0.0), 0.4, 0.1, 2);
        vec![
            Isovertex { id: 0, isoline: outer },
            Isovertex { id: 1, isoline: inner },
        ]
    }

    /// Brute-force oracle: mutually nearest pairs by direct enumeration over
    /// all point pairs, no connecting-set filtering shortcuts.
    fn mutual_nearest_oracle(a: &Isoline, b: &Isoline) -> Vec<(usize, usize)> {
        let nearest = |points: &[Point2], p: Point2| -> usize {
            let mut best = (0usize, f64::INFINITY);
            for (i, q) in points.iter().enumerate() {
                let d = p.dist(*q);
                if d < best.1 {
                    best = (i, d);
                }
            }
            best.0
        };
        let mut out = Vec::new();
        for p in 0..a.len() {
            let q = nearest(&b.points, a.points[p]);
            if nearest(&a.points, b.points[q]) == p {
                out.push((p, q));
            }
        }
        out
    }

    #[test]
    fn connecting_set_is_all_points_for_singleton_layer() {
        let verts = two_circles();
        let (v44, v25) = (verts[0].isoline.len(), verts[1].isoline.len());
        assert_eq!((v44, v25), (44, 25));
        let set = connecting_segment_set(&verts[0], &verts[1], &verts);
        assert_eq!(set.len(), 44, "single layer-mate means no exclusions");
    }

    #[test]
    fn connecting_set_splits_between_two_inner_circles() {
        // One outer ring, two small inner circles left and right.
        let outer = Isovertex { id: 0, isoline: circle(Point2::new(0.0, 0.0), 1.0, 0.1, 1) };
        let left = Isovertex { id: 1, isoline: circle(Point2::new(-0.5, 0.0), 0.25, 0.1, 2) };
        let right = Isovertex { id: 2, isoline: circle(Point2::new(0.5, 0.0), 0.25, 0.1, 2) };
        let all = vec![outer, left, right];
        let to_left = connecting_segment_set(&all[0], &all[1], &all);
        let to_right = connecting_segment_set(&all[0], &all[2], &all);
        assert!(!to_left.is_empty() && !to_right.is_empty());
        // The two sets partition the outer ring minus tie points.
        let overlap: Vec<_> = to_left.iter().filter(|i| to_right.contains(i)).collect();
        assert!(overlap.is_empty());
        assert!(to_left.len() + to_right.len() <= all[0].isoline.len());
        // Left-half points go to the left circle.
        for &i in &to_left {
            assert!(all[0].isoline.point(i).x < 0.0);
        }
    }

    #[test]
    fn tuples_match_mutual_nearest_oracle() {
        let verts = two_circles();
        let got = stitching_tuples(&verts[0], &verts[1], &verts);
        let want = mutual_nearest_oracle(&verts[0].isoline, &verts[1].isoline);
        let got_pairs: Vec<(usize, usize)> =
            got.iter().map(|t| (t.p_index, t.q_index)).collect();
        assert_eq!(got_pairs, want);
        assert!(!got.is_empty());
        assert!(got.len() <= 25);
        // Sorted by p_index, no duplicate endpoints on either side.
        for w in got.windows(2) {
            assert!(w[0].p_index < w[1].p_index);
        }
        let mut qs: Vec<usize> = got.iter().map(|t| t.q_index).collect();
        qs.sort_unstable();
        qs.dedup();
        assert_eq!(qs.len(), got.len());
    }

    #[test]
    fn tuples_are_symmetric_up_to_orientation() {
        let verts = two_circles();
        let ab = stitching_tuples(&verts[0], &verts[1], &verts);
        let ba = stitching_tuples(&verts[1], &verts[0], &verts);
        let mut ab_pairs: Vec<(usize, usize)> =
            ab.iter().map(|t| (t.p_index, t.q_index)).collect();
        let mut ba_pairs: Vec<(usize, usize)> =
            ba.iter().map(|t| (t.q_index, t.p_index)).collect();
        ab_pairs.sort_unstable();
        ba_pairs.sort_unstable();
        assert_eq!(ab_pairs, ba_pairs);
    }

    fn disc_graph(l: f64) -> Isograph {
        let ws = Workspace::new(
            "disc",
            (0..256)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / 256.0;
                    Point2::new(a.cos(), a.sin())
                })
                .collect(),
            vec![],
        )
        .unwrap();
        let field = build_distance_field(&ws, l / 4.0).unwrap();
        build_isograph(extract_isolines(&field, l).unwrap(), l).unwrap()
    }

    fn disc_workspace() -> Workspace {
        Workspace::new(
            "disc",
            (0..256)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / 256.0;
                    Point2::new(a.cos(), a.sin())
                })
                .collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn disc_graph_is_a_path() {
        let g = disc_graph(0.15);
        assert_eq!(g.vertices.len(), 6);
        assert_eq!(g.edges.len(), 5);
        assert!(g.connected);
        // Vertex ids sorted by layer; each edge joins consecutive layers.
        for e in &g.edges {
            assert_eq!(g.vertices[e.u].layer() + 1, g.vertices[e.v].layer());
            assert_eq!(e.kind, EdgeKind::Original);
            assert_eq!(e.weight, 0.0);
            assert!(!e.tuples.is_empty());
        }
        for (i, v) in g.vertices.iter().enumerate() {
            assert_eq!(v.id, i);
            assert_eq!(v.layer(), i as u32 + 1);
            assert_eq!(v.weight(), v.isoline.len() as f64);
        }
    }

    #[test]
    fn augment_adds_shortcuts_within_delta() {
        let ws = disc_workspace();
        let g = disc_graph(0.15);
        for delta in [2u32, 3, 4] {
            let aug = augment(&g, delta, &ws).unwrap();
            for e in &aug.edges {
                if e.kind != EdgeKind::Augmented {
                    continue;
                }
                let d = g.vertices[e.u].layer().abs_diff(g.vertices[e.v].layer());
                assert!(d >= 2 && d <= delta);
                assert!((e.weight - g.step * d as f64).abs() < 1e-12);
                assert_eq!(e.via_path.first(), Some(&e.u));
                assert_eq!(e.via_path.last(), Some(&e.v));
                assert!(!e.tuples.is_empty());
                assert_eq!(e.tuples.len(), e.tuple_chains.len());
                for (t, c) in e.tuples.iter().zip(&e.tuple_chains) {
                    assert_eq!(c.len(), e.via_path.len() - 2);
                    let _ = t;
                }
            }
        }
    }

    #[test]
    fn augment_is_monotone_in_delta() {
        let ws = disc_workspace();
        let g = disc_graph(0.15);
        let count = |d: u32| {
            augment(&g, d, &ws)
                .unwrap()
                .edges
                .iter()
                .filter(|e| e.kind == EdgeKind::Augmented)
                .count()
        };
        assert!(count(2) <= count(3));
        assert!(count(3) <= count(4));
        assert!(count(2) > 0, "a 6-layer disc admits at least one shortcut");
    }

    #[test]
    fn augment_is_idempotent() {
        let ws = disc_workspace();
        let g = disc_graph(0.15);
        let once = augment(&g, 3, &ws).unwrap();
        let twice = augment(&once, 3, &ws).unwrap();
        assert_eq!(once.edges.len(), twice.edges.len());
    }

    #[test]
    fn augment_rejects_delta_below_two() {
        let ws = disc_workspace();
        let g = disc_graph(0.15);
        assert!(matches!(
            augment(&g, 1, &ws),
            Err(IsographError::InvalidDelta(1))
        ));
    }

    #[test]
    fn annulus_graph_is_disconnected_and_bridgeable() {
        let ws = Workspace::new(
            "annulus",
            (0..256)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / 256.0;
                    Point2::new(2.0 * a.cos(), 2.0 * a.sin())
                })
                .collect(),
            vec![(0..256)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / 256.0;
                    Point2::new(a.cos(), a.sin())
                })
                .collect()],
        )
        .unwrap();
        let l = 0.2;
        let field = build_distance_field(&ws, l / 4.0).unwrap();
        let mut g = build_isograph(extract_isolines(&field, l).unwrap(), l).unwrap();
        assert_eq!(g.vertices.len(), 4);
        assert!(!g.connected, "inner and outer ring families never stitch");
        bridge_components(&mut g);
        assert!(g.connected);
        let bridges: Vec<&IsoEdge> =
            g.edges.iter().filter(|e| e.kind == EdgeKind::Bridge).collect();
        assert_eq!(bridges.len(), 1);
        assert_eq!(bridges[0].tuples.len(), 1);
        assert!(bridges[0].weight > 0.0);
    }
}
