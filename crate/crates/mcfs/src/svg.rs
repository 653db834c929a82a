//! Deterministic SVG rendering of workspaces, isolines, and coverage paths.
//!
//! Coordinates are emitted with three decimals so the same plan always
//! produces byte-identical output. The y axis is flipped so the drawing
//! matches the usual mathematical orientation.

use crate::cfs::CoveragePath;
use crate::geom::{Isoline, Point2, Workspace};
use std::fmt::Write;

/// Per-robot stroke colors, reused cyclically.
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Render a workspace with optional isolines and coverage paths.
pub fn render(ws: &Workspace, isolines: &[Isoline], paths: &[CoveragePath]) -> String {
    let (min, max) = ws.bounding_box();
    let pad = 0.05 * (max.x - min.x).max(max.y - min.y).max(1e-9);
    let (x0, y0) = (min.x - pad, min.y - pad);
    let (w, h) = (max.x - min.x + 2.0 * pad, max.y - min.y + 2.0 * pad);
    let scale = 800.0 / w.max(h);
    let (pw, ph) = (w * scale, h * scale);
    let tx = move |p: Point2| -> (f64, f64) { ((p.x - x0) * scale, (h - (p.y - y0)) * scale) };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{pw:.0}" height="{ph:.0}" viewBox="0 0 {pw:.3} {ph:.3}">"#
    );
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);

    // Workspace: exterior filled, holes cut out via even-odd rule.
    let mut d = String::new();
    ring_path(&mut d, &ws.exterior, tx);
    for hole in &ws.holes {
        ring_path(&mut d, hole, tx);
    }
    let _ = writeln!(
        out,
        r##"<path d="{d}" fill="#f2f2f2" stroke="#333333" stroke-width="2" fill-rule="evenodd"/>"##
    );

    for iso in isolines {
        let mut d = String::new();
        ring_path(&mut d, &iso.points, tx);
        let _ = writeln!(
            out,
            r##"<path d="{d}" fill="none" stroke="#bbbbbb" stroke-width="1" stroke-dasharray="4 3"/>"##
        );
    }

    for path in paths {
        if path.points.is_empty() {
            continue;
        }
        let color = PALETTE[path.robot % PALETTE.len()];
        let mut d = String::new();
        for (i, &p) in path.points.iter().enumerate() {
            let (x, y) = tx(p);
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{x:.3} {y:.3} ");
        }
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="2" stroke-linejoin="round"/>"#,
            d.trim_end()
        );
        let (sx, sy) = tx(path.points[0]);
        let _ = writeln!(out, r#"<circle cx="{sx:.3}" cy="{sy:.3}" r="5" fill="{color}"/>"#);
    }

    out.push_str("</svg>\n");
    out
}

fn ring_path(d: &mut String, ring: &[Point2], tx: impl Fn(Point2) -> (f64, f64)) {
    for (i, &p) in ring.iter().enumerate() {
        let (x, y) = tx(p);
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{x:.3} {y:.3} ");
    }
    d.push_str("Z ");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfs::PointSource;

    fn square() -> Workspace {
        Workspace::new(
            "square",
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(2.0, 0.0),
                Point2::new(2.0, 2.0),
                Point2::new(0.0, 2.0),
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn render_is_deterministic() {
        let ws = square();
        let path = CoveragePath {
            robot: 0,
            points: vec![Point2::new(0.5, 0.5), Point2::new(1.5, 1.5)],
            sources: vec![
                PointSource { vertex: 0, index: 0, via: false },
                PointSource { vertex: 0, index: 1, via: false },
            ],
            closed: false,
        };
        let a = render(&ws, &[], &[path.clone()]);
        let b = render(&ws, &[], &[path]);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.trim_end().ends_with("</svg>"));
        assert!(a.contains("#1f77b4"));
    }

    #[test]
    fn holes_are_rendered_with_evenodd() {
        let ws = Workspace::new(
            "holed",
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(4.0, 0.0),
                Point2::new(4.0, 4.0),
                Point2::new(0.0, 4.0),
            ],
            vec![vec![
                Point2::new(1.0, 1.0),
                Point2::new(2.0, 1.0),
                Point2::new(2.0, 2.0),
                Point2::new(1.0, 2.0),
            ]],
        )
        .unwrap();
        let svg = render(&ws, &[], &[]);
        assert!(svg.contains("evenodd"));
        assert_eq!(svg.matches('Z').count(), 2);
    }
}
