//! Plan quality measures: makespan, smoothness, coverage, and overlap.
//!
//! Coverage and overlap are measured on a raster of the workspace interior
//! at a quarter-track cell size. Every path is sampled densely and stamps
//! the cells within half a track width. A cell revisited by the same robot
//! counts as overlap only when the two passes are at least two track widths
//! apart along the path, so consecutive samples of one pass never
//! self-overlap; separate robots always count separately.

use crate::cfs::{curvature_of_triple, CoveragePath};
use crate::geom::{Point2, Workspace};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    /// Longest single-robot path length.
    pub makespan: f64,
    pub path_lengths: Vec<f64>,
    /// Mean discrete curvature over all interior path points.
    pub mean_curvature: f64,
    /// Fraction of interior cells within half a track of some path.
    pub coverage_ratio: f64,
    /// Fraction of covered cells visited more than once.
    pub overlap_ratio: f64,
}

/// Evaluate paths against a workspace at track width `l`.
pub fn evaluate(ws: &Workspace, paths: &[CoveragePath], l: f64) -> Metrics {
    let path_lengths: Vec<f64> = paths.iter().map(|p| p.length()).collect();
    let makespan = path_lengths.iter().cloned().fold(0.0, f64::max);

    let mut curv_sum = 0.0;
    let mut curv_n = 0usize;
    for p in paths {
        for w in p.points.windows(3) {
            if let Some(k) = curvature_of_triple(w[0], w[1], w[2]) {
                curv_sum += k;
                curv_n += 1;
            }
        }
    }
    let mean_curvature = if curv_n == 0 { 0.0 } else { curv_sum / curv_n as f64 };

    let (coverage_ratio, overlap_ratio) = raster_ratios(ws, paths, l);
    Metrics { makespan, path_lengths, mean_curvature, coverage_ratio, overlap_ratio }
}

/// Visit bookkeeping for one raster cell.
#[derive(Debug, Clone, Copy)]
struct Visit {
    robot: usize,
    last_arc: f64,
}

fn raster_ratios(ws: &Workspace, paths: &[CoveragePath], l: f64) -> (f64, f64) {
    let cell = l / 4.0;
    let radius = l / 2.0;
    let (min, max) = ws.bounding_box();
    let origin = Point2::new(min.x - l, min.y - l);
    let nx = (((max.x + l - origin.x) / cell).ceil() as usize) + 1;
    let ny = (((max.y + l - origin.y) / cell).ceil() as usize) + 1;

    // Interior mask by cell-center containment.
    let inside: Vec<bool> = (0..nx * ny)
        .map(|i| {
            let (ix, iy) = (i % nx, i / nx);
            let c = Point2::new(
                origin.x + ix as f64 * cell,
                origin.y + iy as f64 * cell,
            );
            ws.contains(c)
        })
        .collect();
    let interior_total = inside.iter().filter(|&&b| b).count();
    if interior_total == 0 {
        return (0.0, 0.0);
    }

    let mut visits: Vec<Vec<Visit>> = vec![Vec::new(); nx * ny];
    let min_separation = 2.0 * l;
    for path in paths {
        let mut arc = 0.0;
        for w in path.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let seg = a.dist(b);
            // Exact segment swath: every cell center within the radius.
            let lo_x = (((a.x.min(b.x) - radius - origin.x) / cell).floor() as isize).max(0);
            let hi_x = (((a.x.max(b.x) + radius - origin.x) / cell).ceil() as isize)
                .min(nx as isize - 1);
            let lo_y = (((a.y.min(b.y) - radius - origin.y) / cell).floor() as isize).max(0);
            let hi_y = (((a.y.max(b.y) + radius - origin.y) / cell).ceil() as isize)
                .min(ny as isize - 1);
            for iy in lo_y..=hi_y {
                for ix in lo_x..=hi_x {
                    let idx = iy as usize * nx + ix as usize;
                    if !inside[idx] {
                        continue;
                    }
                    let center = Point2::new(
                        origin.x + ix as f64 * cell,
                        origin.y + iy as f64 * cell,
                    );
                    // Projection parameter along the segment for the arc
                    // position of this pass.
                    let (d, t) = project(center, a, b);
                    if d > radius + 1e-12 {
                        continue;
                    }
                    let sample_arc = arc + seg * t;
                    let cell_visits = &mut visits[idx];
                    match cell_visits.iter_mut().find(|v| {
                        v.robot == path.robot
                            && (sample_arc - v.last_arc).abs() < min_separation
                    }) {
                        Some(v) => v.last_arc = v.last_arc.max(sample_arc),
                        None => {
                            cell_visits.push(Visit { robot: path.robot, last_arc: sample_arc })
                        }
                    }
                }
            }
            arc += seg;
        }
    }

    let mut covered = 0usize;
    let mut overlapped = 0usize;
    for i in 0..nx * ny {
        if !inside[i] || visits[i].is_empty() {
            continue;
        }
        covered += 1;
        if visits[i].len() > 1 {
            overlapped += 1;
        }
    }
    let coverage = covered as f64 / interior_total as f64;
    let overlap = if covered == 0 { 0.0 } else { overlapped as f64 / covered as f64 };
    (coverage, overlap)
}

/// Distance from `p` to segment a-b and the projection parameter in [0, 1].
fn project(p: Point2, a: Point2, b: Point2) -> (f64, f64) {
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 < 1e-24 {
        return (p.dist(a), 0.0);
    }
    let t = (((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2).clamp(0.0, 1.0);
    let q = Point2::new(a.x + ab.x * t, a.y + ab.y * t);
    (p.dist(q), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfs::PointSource;

    fn square(side: f64) -> Workspace {
        let h = side / 2.0;
        Workspace::new(
            "square",
            vec![
                Point2::new(-h, -h),
                Point2::new(h, -h),
                Point2::new(h, h),
                Point2::new(-h, h),
            ],
            vec![],
        )
        .unwrap()
    }

    fn path_from(points: Vec<Point2>, robot: usize) -> CoveragePath {
        let sources = points
            .iter()
            .enumerate()
            .map(|(i, _)| PointSource { vertex: 0, index: i, via: false })
            .collect();
        CoveragePath { robot, points, sources, closed: false }
    }

    /// Dense boustrophedon sweep of a square at track spacing `l`.
    fn sweep(side: f64, l: f64) -> Vec<Point2> {
        let h = side / 2.0;
        let rows = (side / l).round() as usize;
        let mut pts = Vec::new();
        for r in 0..=rows {
            let y = -h + r as f64 * l;
            let (x0, x1) = if r % 2 == 0 { (-h, h) } else { (h, -h) };
            let cols = 40;
            for c in 0..=cols {
                let x = x0 + (x1 - x0) * c as f64 / cols as f64;
                pts.push(Point2::new(x, y.min(h)));
            }
        }
        pts
    }

    #[test]
    fn full_sweep_covers_square() {
        let l = 0.25;
        let ws = square(2.0);
        let path = path_from(sweep(2.0, l), 0);
        let m = evaluate(&ws, &[path], l);
        assert!(m.coverage_ratio > 0.95, "coverage {}", m.coverage_ratio);
        // Adjacent sweep lines are one track apart: no self-overlap counted.
        assert!(m.overlap_ratio < 0.30, "overlap {}", m.overlap_ratio);
    }

    #[test]
    fn empty_paths_cover_nothing() {
        let ws = square(2.0);
        let m = evaluate(&ws, &[], 0.25);
        assert_eq!(m.coverage_ratio, 0.0);
        assert_eq!(m.overlap_ratio, 0.0);
        assert_eq!(m.makespan, 0.0);
        assert_eq!(m.mean_curvature, 0.0);
    }

    #[test]
    fn single_line_covers_a_band() {
        let l = 0.2;
        let ws = square(2.0);
        let path = path_from(
            vec![Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)],
            0,
        );
        let m = evaluate(&ws, &[path], l);
        // The band is roughly side * track / area wide.
        let expected = (2.0 * l) / 4.0;
        assert!((m.coverage_ratio - expected).abs() < 0.05, "coverage {}", m.coverage_ratio);
        assert_eq!(m.overlap_ratio, 0.0);
    }

    #[test]
    fn two_robots_on_same_line_overlap_fully() {
        let l = 0.2;
        let ws = square(2.0);
        let line = vec![Point2::new(-1.0, 0.0), Point2::new(1.0, 0.0)];
        let a = path_from(line.clone(), 0);
        let b = path_from(line, 1);
        let m = evaluate(&ws, &[a, b], l);
        assert!(m.overlap_ratio > 0.99, "overlap {}", m.overlap_ratio);
    }

    #[test]
    fn same_robot_revisit_after_long_arc_counts_as_overlap() {
        let l = 0.2;
        let ws = square(2.0);
        // Out along y=0, far detour, and back along y=0.
        let mut pts = vec![Point2::new(-0.9, 0.0), Point2::new(0.9, 0.0)];
        pts.push(Point2::new(0.9, 0.9));
        pts.push(Point2::new(-0.9, 0.9));
        pts.push(Point2::new(-0.9, 0.0));
        pts.push(Point2::new(0.9, 0.0));
        let m = evaluate(&ws, &[path_from(pts, 0)], l);
        assert!(m.overlap_ratio > 0.3, "overlap {}", m.overlap_ratio);
    }

    #[test]
    fn short_backtrack_is_not_overlap() {
        let l = 0.2;
        let ws = square(2.0);
        // A tight zig within less than 2l of arc distance.
        let pts = vec![
            Point2::new(-0.2, 0.0),
            Point2::new(0.0, 0.0),
            Point2::new(-0.05, 0.05),
        ];
        let m = evaluate(&ws, &[path_from(pts, 0)], l);
        assert_eq!(m.overlap_ratio, 0.0);
    }

    #[test]
    fn makespan_is_longest_path() {
        let ws = square(2.0);
        let a = path_from(vec![Point2::new(0.0, 0.0), Point2::new(0.5, 0.0)], 0);
        let b = path_from(
            vec![Point2::new(0.0, 0.0), Point2::new(0.0, 0.9)],
            1,
        );
        let m = evaluate(&ws, &[a, b], 0.2);
        assert!((m.makespan - 0.9).abs() < 1e-12);
        assert_eq!(m.path_lengths.len(), 2);
    }
}
