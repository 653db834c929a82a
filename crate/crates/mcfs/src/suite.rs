//! Bundled benchmark workspaces with default track widths and robot starts.

use crate::geom::{Point2, Workspace};
use std::f64::consts::PI;

/// One benchmark case: workspace, default track width, one start per robot.
#[derive(Debug, Clone)]
pub struct SuiteCase {
    pub workspace: Workspace,
    pub l: f64,
    pub roots: Vec<Point2>,
}

fn regular_ring(cx: f64, cy: f64, r: f64, n: usize) -> Vec<Point2> {
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            Point2::new(cx + r * a.cos(), cy + r * a.sin())
        })
        .collect()
}

/// Unit disc, two robots sharing one start.
pub fn disc() -> SuiteCase {
    let ws = Workspace::new("disc", regular_ring(0.0, 0.0, 1.0, 256), vec![]).unwrap();
    SuiteCase { workspace: ws, l: 0.1, roots: vec![Point2::new(0.9, 0.0), Point2::new(0.9, 0.0)] }
}

/// Ring-shaped floor between two circles, one robot per side.
pub fn annulus() -> SuiteCase {
    let ws = Workspace::new(
        "annulus",
        regular_ring(0.0, 0.0, 2.0, 256),
        vec![regular_ring(0.0, 0.0, 0.9, 128)],
    )
    .unwrap();
    SuiteCase {
        workspace: ws,
        l: 0.12,
        roots: vec![Point2::new(1.88, 0.0), Point2::new(1.12, 0.0)],
    }
}

/// Two-lobed closed curve r = 1 + 0.55 cos(2a), four robots sharing a start.
pub fn two_lobed() -> SuiteCase {
    let ring: Vec<Point2> = (0..256)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / 256.0;
            let r = 1.0 + 0.55 * (2.0 * a).cos();
            Point2::new(r * a.cos(), r * a.sin())
        })
        .collect();
    let ws = Workspace::new("two_lobed", ring, vec![]).unwrap();
    let start = Point2::new(1.3, 0.0);
    SuiteCase { workspace: ws, l: 0.2, roots: vec![start; 4] }
}

/// L-shaped floor plan with two rectangular obstacles, two separated starts.
pub fn office() -> SuiteCase {
    let outline = vec![
        Point2::new(0.0, 0.0),
        Point2::new(5.0, 0.0),
        Point2::new(6.0, 1.0),
        Point2::new(6.0, 4.0),
        Point2::new(3.0, 4.0),
        Point2::new(3.0, 6.0),
        Point2::new(1.0, 6.0),
        Point2::new(0.0, 5.0),
    ];
    let hole_a = vec![
        Point2::new(1.25, 1.25),
        Point2::new(2.05, 1.25),
        Point2::new(2.05, 2.05),
        Point2::new(1.25, 2.05),
    ];
    let hole_b = vec![
        Point2::new(3.95, 1.5),
        Point2::new(4.8, 1.5),
        Point2::new(4.8, 2.8),
        Point2::new(3.95, 2.8),
    ];
    let ws = Workspace::new("office", outline, vec![hole_a, hole_b]).unwrap();
    SuiteCase {
        workspace: ws,
        l: 0.24,
        roots: vec![Point2::new(0.4, 0.4), Point2::new(5.6, 3.6)],
    }
}

/// Disc of radius 2 with two round obstacles, one robot.
pub fn double_hole() -> SuiteCase {
    let ws = Workspace::new(
        "double_hole",
        regular_ring(0.0, 0.0, 2.0, 256),
        vec![
            regular_ring(-0.9, 0.0, 0.45, 48),
            regular_ring(0.9, 0.0, 0.45, 48),
        ],
    )
    .unwrap();
    SuiteCase { workspace: ws, l: 0.2, roots: vec![Point2::new(0.0, 1.8)] }
}

/// All bundled cases in a fixed order.
pub fn cases() -> Vec<SuiteCase> {
    vec![disc(), annulus(), two_lobed(), office(), double_hole()]
}

/// Look up one case by workspace name.
pub fn by_name(name: &str) -> Option<SuiteCase> {
    cases().into_iter().find(|c| c.workspace.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{build_distance_field, extract_isolines};

    #[test]
    fn all_cases_are_valid_and_coverable() {
        for case in cases() {
            let field = build_distance_field(&case.workspace, case.l / 4.0).unwrap();
            let isolines = extract_isolines(&field, case.l)
                .unwrap_or_else(|e| panic!("{}: {e}", case.workspace.name));
            assert!(!isolines.is_empty(), "{}", case.workspace.name);
            assert!(!case.roots.is_empty());
            for r in &case.roots {
                assert!(
                    case.workspace.contains(*r),
                    "{}: root {r:?} outside",
                    case.workspace.name
                );
            }
        }
    }

    #[test]
    fn names_are_unique_and_lookup_works() {
        let names: Vec<String> =
            cases().iter().map(|c| c.workspace.name.clone()).collect();
        let mut dedup = names.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), names.len());
        assert!(by_name("annulus").is_some());
        assert!(by_name("nonexistent").is_none());
    }
}
