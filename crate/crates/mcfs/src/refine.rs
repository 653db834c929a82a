//! Tree-cover refinement: shrink the makespan by splitting shared isolines.
//!
//! A vertex that belongs to several trees is traversed once per tree; the
//! refinement splits such an isoline (together with one neighbor isoline)
//! into one loop per tree so every tree keeps a connected share instead of
//! the whole ring. Splits are chosen by enumerating stitching-tuple
//! assignments and scoring each by the balance (standard deviation) of the
//! affected tree costs plus a penalty for loops that drift away from their
//! tree's remaining isolines. When no repeated vertex is left, a leaf of the
//! most expensive tree is duplicated into the cheapest adjacent tree to
//! create a new splitting opportunity. The best cover seen is returned.

use crate::isograph::{EdgeKind, IsoEdge, Isograph, StitchingTuple};
use crate::geom::Isoline;
use crate::mmrtc::{Tree, TreeCover};
use serde::Serialize;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

/// Enumeration budget for tuple assignments of one split.
const MAX_ASSIGNMENTS: usize = 4096;

#[derive(Debug, Clone, Copy)]
pub struct RefineOptions {
    /// Extra cap on split iterations; the driver never exceeds half the
    /// original vertex count either way.
    pub max_iterations: Option<usize>,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { max_iterations: None }
    }
}

/// One processed repeated vertex.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    pub popped: usize,
    pub neighbor: Option<usize>,
    pub h: Option<f64>,
    pub makespan_before: f64,
    pub makespan_after: f64,
}

#[derive(Debug)]
pub struct RefineOutcome {
    /// Best cover seen (never worse than the input).
    pub cover: TreeCover,
    /// Input graph plus the loop vertices and split edges added.
    pub graph: Isograph,
    pub trace: Vec<TraceRecord>,
}

/// Split the point sets of isolines `u` and `v` into one loop per tuple.
///
/// Tuples must be oriented (p on u, q on v) and sorted by p. Loop `j` runs
/// counter-clockwise along `u` from `p_j` up to the point before `p_{j+1}`,
/// jumps inward, and returns clockwise along `v` from the point before
/// `q_{j+1}` back to `q_j`. Returns `None` unless the q's wind in the same
/// cyclic order as the p's, which is what makes the loops a partition.
pub fn partition_loops(
    g: &Isograph,
    u: usize,
    v: usize,
    tuples: &[(usize, usize)],
) -> Option<Vec<Vec<(usize, usize)>>> {
    let m = tuples.len();
    if m < 2 {
        return None;
    }
    let nu = g.isoline(u).len();
    let nv = g.isoline(v).len();
    debug_assert!(tuples.windows(2).all(|w| w[0].0 < w[1].0));
    // Distinct q's winding once around v.
    let mut total_v = 0usize;
    for j in 0..m {
        let (_, qj) = tuples[j];
        let (_, qn) = tuples[(j + 1) % m];
        if qj == qn {
            return None;
        }
        total_v += (qn + nv - qj) % nv;
    }
    if total_v != nv {
        return None;
    }
    let mut loops = Vec::with_capacity(m);
    for j in 0..m {
        let (pj, qj) = tuples[j];
        let (pn, qn) = tuples[(j + 1) % m];
        let u_len = (pn + nu - pj) % nu;
        let v_len = (qn + nv - qj) % nv;
        let mut pts = Vec::with_capacity(u_len + v_len);
        for t in 0..u_len {
            pts.push((u, (pj + t) % nu));
        }
        for t in 0..v_len {
            pts.push((v, (qn + nv - 1 - t) % nv));
        }
        loops.push(pts);
    }
    Some(loops)
}

/// A committed split choice: which tree receives which loop.
#[derive(Debug, Clone)]
struct SplitPlan {
    u: usize,
    v: usize,
    /// (tree index, loop points as (source vertex, point index)).
    assignments: Vec<(usize, Vec<(usize, usize)>)>,
}

fn recompute_cover(graph: &Isograph, trees: &[Tree]) -> TreeCover {
    TreeCover::with_costs(
        trees.to_vec(),
        |v| graph.vertices[v].weight(),
        |a, b| graph.edge_between(a, b).map(|e| e.weight).unwrap_or(0.0),
    )
}

fn occurrences(trees: &[Tree], v: usize) -> usize {
    trees.iter().filter(|t| t.contains(v)).count()
}

/// Refine a cover on its graph. Returns the best cover seen, the grown
/// graph, and one trace record per processed repeated vertex.
pub fn refine(g: &Isograph, cover: &TreeCover, opts: &RefineOptions) -> RefineOutcome {
    let mut graph = g.clone();
    let mut trees = cover.trees.clone();
    let n_orig = g.vertices.len();
    let cap = opts
        .max_iterations
        .unwrap_or(usize::MAX)
        .min(n_orig.div_ceil(2));
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> = (0..n_orig)
        .filter_map(|v| {
            let occ = occurrences(&trees, v);
            (occ >= 2).then_some((occ, Reverse(v)))
        })
        .collect();
    let mut trace = Vec::new();
    let mut current = recompute_cover(&graph, &trees);
    let mut best = current.clone();
    let mut iters = 0usize;

    loop {
        while iters < cap {
            let Some((_, Reverse(u))) = heap.pop() else { break };
            if used.contains(&u) || occurrences(&trees, u) < 2 {
                continue;
            }
            let before = current.makespan;
            let mut best_split: Option<(f64, usize, SplitPlan)> = None;
            for v in graph.neighbors(u) {
                if used.contains(&v) || v == u {
                    continue;
                }
                let kind = graph.edge_between(u, v).map(|e| e.kind);
                if kind != Some(EdgeKind::Original) {
                    continue;
                }
                if let Some((h, plan)) = evaluate_split(&graph, &trees, &current.costs, u, v) {
                    let better = best_split
                        .as_ref()
                        .map(|&(bh, _, _)| h < bh)
                        .unwrap_or(true);
                    if better {
                        best_split = Some((h, v, plan));
                    }
                }
            }
            iters += 1;
            match best_split {
                Some((h, v, plan)) => {
                    commit_split(&mut graph, &mut trees, &plan);
                    used.insert(u);
                    used.insert(v);
                    current = recompute_cover(&graph, &trees);
                    trace.push(TraceRecord {
                        popped: u,
                        neighbor: Some(v),
                        h: Some(h),
                        makespan_before: before,
                        makespan_after: current.makespan,
                    });
                    if current.makespan < best.makespan {
                        best = current.clone();
                    }
                }
                None => {
                    used.insert(u);
                    trace.push(TraceRecord {
                        popped: u,
                        neighbor: None,
                        h: None,
                        makespan_before: before,
                        makespan_after: before,
                    });
                }
            }
        }
        if iters >= cap {
            break;
        }
        if !duplicate_leaf(&graph, &mut trees, &current, &used, n_orig, &mut heap) {
            break;
        }
        current = recompute_cover(&graph, &trees);
    }

    RefineOutcome { cover: best, graph, trace }
}

/// Score all tuple assignments for splitting (u, v); returns the best
/// heuristic value and its plan.
fn evaluate_split(
    graph: &Isograph,
    trees: &[Tree],
    costs: &[f64],
    u: usize,
    v: usize,
) -> Option<(f64, SplitPlan)> {
    let holders: Vec<usize> = (0..trees.len())
        .filter(|&i| trees[i].contains(u))
        .collect();
    let m = holders.len();
    if m < 2 {
        return None;
    }
    let edge = graph.edge_between(u, v)?;
    let mut tuples: Vec<(usize, usize)> = edge
        .tuples
        .iter()
        .map(|t| {
            if t.u == u {
                (t.p_index, t.q_index)
            } else {
                (t.q_index, t.p_index)
            }
        })
        .collect();
    tuples.sort_unstable();
    if tuples.len() < m {
        return None;
    }
    // Keep the assignment enumeration within budget by striding the tuples.
    let keep = (MAX_ASSIGNMENTS as f64).powf(1.0 / m as f64).floor() as usize;
    let tuples: Vec<(usize, usize)> = if tuples.len() > keep.max(m) {
        let keep = keep.max(m);
        (0..keep)
            .map(|i| tuples[i * tuples.len() / keep])
            .collect()
    } else {
        tuples
    };

    // Per-holder bookkeeping: cost after removing u (and v), replaced edge
    // weights, and the loop's future tree neighbors.
    struct Holder {
        tree: usize,
        fixed_cost: f64,
        neighbors: Vec<usize>,
    }
    let w_of = |a: usize, b: usize| graph.edge_between(a, b).map(|e| e.weight).unwrap_or(0.0);
    let holders: Vec<Holder> = holders
        .into_iter()
        .map(|ti| {
            let tree = &trees[ti];
            let absorb_v = tree.contains(v);
            let mut fixed = costs[ti] - graph.vertices[u].weight();
            if absorb_v {
                fixed -= graph.vertices[v].weight();
            }
            let mut neighbors = Vec::new();
            for &(a, b) in &tree.edges {
                let touches_u = a == u || b == u;
                let touches_v = absorb_v && (a == v || b == v);
                if !touches_u && !touches_v {
                    continue;
                }
                fixed -= w_of(a, b);
                let other = if a == u || a == v { b } else { a };
                if other != u && other != v {
                    neighbors.push(other);
                }
            }
            neighbors.sort_unstable();
            neighbors.dedup();
            Holder { tree: ti, fixed_cost: fixed, neighbors }
        })
        .collect();

    // Distance from every point of I_u / I_v to each prospective neighbor.
    let mut dmin: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for h in &holders {
        for &x in &h.neighbors {
            dmin.entry(x).or_insert_with(|| {
                let ix = g_points(graph, x);
                let du = g_points(graph, u)
                    .iter()
                    .map(|p| ix.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min))
                    .collect();
                let dv = g_points(graph, v)
                    .iter()
                    .map(|p| ix.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min))
                    .collect();
                (du, dv)
            });
        }
    }

    let stitch_window = 2.0 * graph.step;
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut pick = vec![0usize; m];
    // Odometer over ordered tuple selections: holder i takes tuples[pick[i]].
    'outer: loop {
        let distinct = {
            let mut seen = [false; 64];
            pick.iter().all(|&i| {
                if seen[i] {
                    false
                } else {
                    seen[i] = true;
                    true
                }
            })
        };
        if distinct {
            let mut chosen: Vec<(usize, usize)> = pick.iter().map(|&i| tuples[i]).collect();
            chosen.sort_unstable();
            if let Some(loops) = partition_loops(graph, u, v, &chosen) {
                let mut sum = 0.0;
                let mut sumsq = 0.0;
                let mut penalty = 0.0;
                for (hi, h) in holders.iter().enumerate() {
                    let j = chosen
                        .iter()
                        .position(|&t| t == tuples[pick[hi]])
                        .unwrap();
                    let lp = &loops[j];
                    let c = h.fixed_cost + lp.len() as f64;
                    sum += c;
                    sumsq += c * c;
                    for &x in &h.neighbors {
                        let (du, dv) = &dmin[&x];
                        let d = lp
                            .iter()
                            .map(|&(src, idx)| if src == u { du[idx] } else { dv[idx] })
                            .fold(f64::INFINITY, f64::min);
                        if d > stitch_window {
                            penalty += d;
                        }
                    }
                }
                let mean = sum / m as f64;
                let var = (sumsq / m as f64 - mean * mean).max(0.0);
                let score = var.sqrt() + penalty;
                let better = best.as_ref().map(|&(b, _)| score < b).unwrap_or(true);
                if better {
                    best = Some((score, pick.clone()));
                }
            }
        }
        // Advance the odometer.
        for slot in (0..m).rev() {
            pick[slot] += 1;
            if pick[slot] < tuples.len() {
                continue 'outer;
            }
            pick[slot] = 0;
        }
        break;
    }

    let (score, pick) = best?;
    let mut chosen: Vec<(usize, usize)> = pick.iter().map(|&i| tuples[i]).collect();
    chosen.sort_unstable();
    let loops = partition_loops(graph, u, v, &chosen)?;
    let assignments = holders
        .iter()
        .enumerate()
        .map(|(hi, h)| {
            let j = chosen
                .iter()
                .position(|&t| t == tuples[pick[hi]])
                .unwrap();
            (h.tree, loops[j].clone())
        })
        .collect();
    Some((score, SplitPlan { u, v, assignments }))
}

fn g_points(graph: &Isograph, v: usize) -> &[crate::geom::Point2] {
    &graph.isoline(v).points
}

/// Apply a split: add one loop vertex per affected tree, rewire the trees,
/// and connect each loop to its tree's remaining vertices with split edges
/// carrying the surviving tuples.
fn commit_split(graph: &mut Isograph, trees: &mut [Tree], plan: &SplitPlan) {
    let (u, v) = (plan.u, plan.v);
    for (ti, loop_pts) in &plan.assignments {
        let tree = &mut trees[*ti];
        let absorb_v = tree.contains(v);
        // The loop becomes a new graph vertex.
        let points: Vec<crate::geom::Point2> = loop_pts
            .iter()
            .map(|&(src, idx)| graph.isoline(src).point(idx))
            .collect();
        let iso = Isoline {
            layer: graph.vertex(u).layer(),
            points,
            spacing: graph.isoline(u).spacing,
        };
        let z = graph.push_vertex(iso);
        let loop_pos: BTreeMap<(usize, usize), usize> = loop_pts
            .iter()
            .enumerate()
            .map(|(i, &s)| (s, i))
            .collect();

        // Rewire the tree: z replaces u (and v when the tree held it).
        let old_edges: Vec<(usize, usize)> = tree.edges.iter().cloned().collect();
        let replaced = |w: usize| w == u || (absorb_v && w == v);
        let mut new_neighbors: BTreeSet<usize> = BTreeSet::new();
        for (a, b) in old_edges {
            if replaced(a) && replaced(b) {
                tree.edges.remove(&(a, b));
            } else if replaced(a) || replaced(b) {
                tree.edges.remove(&(a, b));
                let other = if replaced(a) { b } else { a };
                tree.edges.insert((other.min(z), other.max(z)));
                new_neighbors.insert(other);
            }
        }
        tree.vertices.remove(&u);
        if absorb_v {
            tree.vertices.remove(&v);
        }
        tree.vertices.insert(z);
        if replaced(tree.root) {
            tree.root = z;
        }

        // One split edge per retained neighbor, with remapped tuples.
        for x in new_neighbors {
            let mut tuples: Vec<StitchingTuple> = Vec::new();
            let mut chains: Vec<Vec<usize>> = Vec::new();
            let mut via_path: Vec<usize> = Vec::new();
            for side in [u, v] {
                if side == v && !absorb_v {
                    continue;
                }
                let Some(edge) = graph.edge_between(side, x) else { continue };
                for (i, t) in edge.tuples.iter().enumerate() {
                    let (side_idx, x_idx) = if t.u == side {
                        (t.p_index, t.q_index)
                    } else {
                        (t.q_index, t.p_index)
                    };
                    if let Some(&local) = loop_pos.get(&(side, side_idx)) {
                        tuples.push(StitchingTuple {
                            u: z,
                            v: x,
                            p_index: local,
                            q_index: x_idx,
                        });
                        let chain = edge.tuple_chains.get(i).cloned().unwrap_or_default();
                        if !chain.is_empty() && via_path.is_empty() {
                            via_path = edge.via_path.clone();
                            if let Some(first) = via_path.first_mut() {
                                if *first == side {
                                    *first = z;
                                }
                            }
                            if let Some(last) = via_path.last_mut() {
                                if *last == side {
                                    *last = z;
                                }
                            }
                        }
                        chains.push(chain);
                    }
                }
            }
            let mut order: Vec<usize> = (0..tuples.len()).collect();
            order.sort_by_key(|&i| (tuples[i].p_index, tuples[i].q_index));
            let tuples: Vec<StitchingTuple> = order.iter().map(|&i| tuples[i]).collect();
            let chains: Vec<Vec<usize>> = order.iter().map(|&i| chains[i].clone()).collect();
            let keep_chains = chains.iter().any(|c| !c.is_empty());
            graph.push_edge(IsoEdge {
                u: z,
                v: x,
                kind: EdgeKind::Split,
                weight: 0.0,
                tuples,
                via_path: if keep_chains { via_path } else { Vec::new() },
                tuple_chains: if keep_chains { chains } else { Vec::new() },
            });
        }
    }
}

/// Duplicate a leaf of the most expensive tree into the cheapest adjacent
/// tree, creating a repeated vertex for the next split. Returns false when
/// no candidate exists.
fn duplicate_leaf(
    graph: &Isograph,
    trees: &mut [Tree],
    current: &TreeCover,
    used: &BTreeSet<usize>,
    n_orig: usize,
    heap: &mut BinaryHeap<(usize, Reverse<usize>)>,
) -> bool {
    let hi = (0..trees.len())
        .max_by(|&a, &b| {
            current.costs[a]
                .partial_cmp(&current.costs[b])
                .unwrap()
                .then(b.cmp(&a))
        })
        .unwrap();
    let lo = (0..trees.len())
        .min_by(|&a, &b| {
            current.costs[a]
                .partial_cmp(&current.costs[b])
                .unwrap()
                .then(a.cmp(&b))
        })
        .unwrap();
    if hi == lo {
        return false;
    }
    let mut leaves: Vec<usize> = trees[hi]
        .leaves()
        .into_iter()
        .filter(|&l| l < n_orig && !used.contains(&l))
        .collect();
    leaves.sort_unstable();
    for u in leaves {
        if trees[lo].contains(u) {
            continue;
        }
        for v in graph.neighbors(u) {
            if trees[lo].contains(v) && !used.contains(&v) {
                trees[lo].vertices.insert(u);
                trees[lo].edges.insert((u.min(v), u.max(v)));
                heap.push((occurrences(trees, u), Reverse(u)));
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfs::{unified_cfs, SelectorConfig};
    use crate::geom::Point2;
    use crate::isograph::build_isograph;
    use crate::mmrtc::{solve, warm_start, MmrtcInstance, SolveOptions};

    fn circle(r: f64, layer: u32) -> Isoline {
        let n = (2.0 * std::f64::consts::PI * r / 0.1).round() as usize;
        let pts: Vec<Point2> = (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Point2::new(r * a.cos(), r * a.sin())
            })
            .collect();
        Isoline { layer, points: pts, spacing: 2.0 * std::f64::consts::PI * r / n as f64 }
    }

    /// Nested rings 0.1 apart, outermost first; graph is a path.
    fn ring_graph(count: usize) -> Isograph {
        let rings: Vec<Isoline> = (0..count)
            .map(|i| circle(0.1 * (count - i) as f64, (i + 1) as u32))
            .collect();
        build_isograph(rings, 0.1).unwrap()
    }

    fn tree_of(root: usize, ids: &[usize], edges: &[(usize, usize)]) -> Tree {
        Tree {
            root,
            vertices: ids.iter().cloned().collect(),
            edges: edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect(),
        }
    }

    #[test]
    fn partition_covers_both_rings_exactly_once() {
        let g = ring_graph(2);
        let (nu, nv) = (g.isoline(0).len(), g.isoline(1).len());
        let tuples = vec![(0, 0), (nu / 2, nv / 2)];
        let loops = partition_loops(&g, 0, 1, &tuples).unwrap();
        assert_eq!(loops.len(), 2);
        let mut seen = BTreeSet::new();
        for lp in &loops {
            for &pt in lp {
                assert!(seen.insert(pt), "duplicate point {pt:?}");
            }
        }
        assert_eq!(seen.len(), nu + nv);
        // Loop 0 starts at its own tuple's p.
        assert_eq!(loops[0][0], (0, 0));
        assert_eq!(loops[1][0], (0, nu / 2));
    }

    #[test]
    fn partition_rejects_crossed_tuples() {
        let g = ring_graph(2);
        let nv = g.isoline(1).len();
        // Three tuples whose q's wind backwards cannot tile the inner ring.
        let tuples = vec![(0, 0), (10, 2 * nv / 3), (20, nv / 3)];
        assert!(partition_loops(&g, 0, 1, &tuples).is_none());
        // Duplicate q's are rejected as well.
        assert!(partition_loops(&g, 0, 1, &[(0, 5), (10, 5)]).is_none());
    }

    #[test]
    fn partition_three_ways() {
        let g = ring_graph(2);
        let (nu, nv) = (g.isoline(0).len(), g.isoline(1).len());
        let tuples = vec![(0, 0), (nu / 3, nv / 3), (2 * nu / 3, 2 * nv / 3)];
        let loops = partition_loops(&g, 0, 1, &tuples).unwrap();
        assert_eq!(loops.len(), 3);
        let total: usize = loops.iter().map(|l| l.len()).sum();
        assert_eq!(total, nu + nv);
    }

    #[test]
    fn split_removes_shared_vertex_and_balances() {
        // Path 0-1-2; both trees share the middle ring.
        let g = ring_graph(3);
        let trees = vec![
            tree_of(0, &[0, 1], &[(0, 1)]),
            tree_of(2, &[1, 2], &[(1, 2)]),
        ];
        let cover = recompute_cover(&g, &trees);
        let before = cover.makespan;
        let out = refine(&g, &cover, &RefineOptions::default());
        assert!(out.cover.makespan <= before);
        assert_eq!(out.trace.len(), 1);
        let rec = &out.trace[0];
        assert_eq!(rec.popped, 1);
        let v = rec.neighbor.expect("split committed");
        assert!(v == 0 || v == 2);
        // The shared ring is gone from every tree; two loops were added.
        for t in &out.cover.trees {
            assert!(!t.contains(1));
            assert!(t.is_valid());
        }
        assert_eq!(out.graph.vertices.len(), 5);
        let added: usize = (3..5).map(|z| out.graph.isoline(z).len()).sum();
        assert_eq!(added, g.isoline(1).len() + g.isoline(v).len());
    }

    #[test]
    fn refined_trees_still_stitch_into_closed_paths() {
        let g = ring_graph(4);
        let trees = vec![
            tree_of(0, &[0, 1, 2], &[(0, 1), (1, 2)]),
            tree_of(3, &[2, 3], &[(2, 3)]),
        ];
        let cover = recompute_cover(&g, &trees);
        let out = refine(&g, &cover, &RefineOptions::default());
        for (robot, tree) in out.cover.trees.iter().enumerate() {
            let path = unified_cfs(&out.graph, tree, robot, &SelectorConfig::default())
                .expect("refined tree stitches");
            // Every point of every tree isoline appears exactly once.
            let mut expected = BTreeSet::new();
            for &v in &tree.vertices {
                for i in 0..out.graph.isoline(v).len() {
                    expected.insert((v, i));
                }
            }
            let mut seen = BTreeSet::new();
            for s in path.sources.iter().filter(|s| !s.via) {
                assert!(seen.insert((s.vertex, s.index)));
            }
            assert_eq!(seen, expected);
            assert!(path.max_gap() <= 2.5 * 0.1, "gap {}", path.max_gap());
        }
    }

    #[test]
    fn makespan_never_increases_and_iterations_bounded() {
        let g = ring_graph(6);
        let inst = MmrtcInstance::from_isograph(&g, vec![0, 0]).unwrap();
        let warm = warm_start(&inst).unwrap();
        let solved = solve(&inst, &warm, &SolveOptions::default()).unwrap();
        let out = refine(&g, &solved.cover, &RefineOptions::default());
        assert!(out.cover.makespan <= solved.cover.makespan);
        assert!(out.trace.len() <= 3);
        for rec in &out.trace {
            assert!(rec.makespan_after.is_finite());
        }
    }

    #[test]
    fn leaf_duplication_rebalances_disjoint_trees() {
        // Four rings; tree 0 owns three of them, tree 1 owns one. No vertex
        // is shared, so refinement must create a repeat by duplication.
        let g = ring_graph(4);
        let trees = vec![
            tree_of(0, &[0, 1, 2], &[(0, 1), (1, 2)]),
            tree_of(3, &[3], &[]),
        ];
        let cover = recompute_cover(&g, &trees);
        let before = cover.makespan;
        let out = refine(&g, &cover, &RefineOptions::default());
        assert!(!out.trace.is_empty(), "duplication created a split");
        assert!(out.cover.makespan < before, "makespan {}", out.cover.makespan);
        for t in &out.cover.trees {
            assert!(t.is_valid());
        }
    }

    #[test]
    fn iteration_cap_is_respected() {
        let g = ring_graph(6);
        let trees = vec![
            tree_of(0, &[0, 1, 2, 3, 4, 5], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]),
            tree_of(5, &[5], &[]),
        ];
        let cover = recompute_cover(&g, &trees);
        let out = refine(&g, &cover, &RefineOptions { max_iterations: Some(1) });
        assert!(out.trace.len() <= 1);
    }
}
