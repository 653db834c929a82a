//! Workspace geometry: polygons, signed distance field, isoline extraction.
//!
//! The workspace is a simple polygon with optional hole polygons. A signed
//! distance field (positive inside, negative outside) is sampled on a regular
//! grid, marching squares pulls closed contours at levels `i * l`, and each
//! contour is resampled to equidistant points spaced `l` apart along its arc.

use serde::{Deserialize, Serialize};
use std::fmt;

/// 2D point in workspace coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Lexicographic order on (x, y); total because workspace coords are finite.
    pub fn lex_cmp(self, other: Point2) -> std::cmp::Ordering {
        self.x
            .partial_cmp(&other.x)
            .unwrap()
            .then(self.y.partial_cmp(&other.y).unwrap())
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

/// Signed area of a closed ring (positive = counterclockwise).
pub fn signed_area(ring: &[Point2]) -> f64 {
    let n = ring.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    acc / 2.0
}

/// Distance from `p` to the segment `a`-`b`.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.x * ab.x + ab.y * ab.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2;
    let t = t.clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

/// Distance from `p` to a closed polyline (all segments including last-first).
pub fn point_ring_distance(p: Point2, ring: &[Point2]) -> f64 {
    let n = ring.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let d = point_segment_distance(p, ring[i], ring[(i + 1) % n]);
        if d < best {
            best = d;
        }
    }
    best
}

/// True if segments `a`-`b` and `c`-`d` properly intersect or touch.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
        (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
    }
    fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
        p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
    }
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

#[derive(Debug, thiserror::Error)]
pub enum GeomError {
    #[error("workspace `{0}` is degenerate: {1}")]
    DegenerateWorkspace(String, String),
    #[error("no coverable layers: max interior clearance {l_max:.4} < l = {l:.4}")]
    NoCoverableLayers { l_max: f64, l: f64 },
    #[error("contour perimeter {perimeter:.4} below minimum {min:.4}")]
    PerimeterTooSmall { perimeter: f64, min: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Planar workspace: one exterior boundary plus zero or more hole polygons.
///
/// The constructor normalizes orientation: exterior counterclockwise
/// (positive area), holes clockwise (negative area).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Workspace {
    pub name: String,
    pub exterior: Vec<Point2>,
    pub holes: Vec<Vec<Point2>>,
}

impl Workspace {
    pub fn new(
        name: impl Into<String>,
        exterior: Vec<Point2>,
        holes: Vec<Vec<Point2>>,
    ) -> Result<Self, GeomError> {
        let name = name.into();
        let mut ws = Workspace { name, exterior, holes };
        ws.normalize_orientation();
        ws.validate()?;
        Ok(ws)
    }

    fn normalize_orientation(&mut self) {
        if signed_area(&self.exterior) < 0.0 {
            self.exterior.reverse();
        }
        for hole in &mut self.holes {
            if signed_area(hole) > 0.0 {
                hole.reverse();
            }
        }
    }

    fn validate(&self) -> Result<(), GeomError> {
        let err = |msg: String| GeomError::DegenerateWorkspace(self.name.clone(), msg);
        if self.exterior.len() < 3 {
            return Err(err("exterior has fewer than 3 vertices".into()));
        }
        let area = signed_area(&self.exterior);
        if area.abs() < 1e-12 {
            return Err(err("exterior has zero area".into()));
        }
        for (hi, hole) in self.holes.iter().enumerate() {
            if hole.len() < 3 {
                return Err(err(format!("hole {hi} has fewer than 3 vertices")));
            }
            if signed_area(hole).abs() < 1e-12 {
                return Err(err(format!("hole {hi} has zero area")));
            }
            for p in hole {
                if !point_in_ring(*p, &self.exterior) {
                    return Err(err(format!("hole {hi} is not inside the exterior")));
                }
            }
        }
        // Holes must not overlap each other.
        for i in 0..self.holes.len() {
            for j in (i + 1)..self.holes.len() {
                if rings_intersect(&self.holes[i], &self.holes[j])
                    || point_in_ring(self.holes[i][0], &self.holes[j])
                    || point_in_ring(self.holes[j][0], &self.holes[i])
                {
                    return Err(err(format!("holes {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }

    /// All boundary rings: exterior first, then holes.
    pub fn rings(&self) -> impl Iterator<Item = &[Point2]> {
        std::iter::once(self.exterior.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    /// Strictly-inside test: inside the exterior and outside every hole.
    pub fn contains(&self, p: Point2) -> bool {
        if !point_in_ring(p, &self.exterior) {
            return false;
        }
        !self.holes.iter().any(|h| point_in_ring(p, h))
    }

    /// Unsigned distance from `p` to the nearest boundary ring.
    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.rings()
            .map(|r| point_ring_distance(p, r))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for r in self.rings() {
            for p in r {
                min.x = min.x.min(p.x);
                min.y = min.y.min(p.y);
                max.x = max.x.max(p.x);
                max.y = max.y.max(p.y);
            }
        }
        (min, max)
    }

    /// Diameter of the bounding box (used to scale `l` in benchmarks).
    /// Largest distance between any two boundary points (attained at vertices).
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, &a) in self.exterior.iter().enumerate() {
            for &b in &self.exterior[i + 1..] {
                best = best.max(a.dist(b));
            }
        }
        best
    }
}

/// Even-odd point-in-polygon test.
fn point_in_ring(p: Point2, ring: &[Point2]) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = ring[i];
        let b = ring[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn rings_intersect(a: &[Point2], b: &[Point2]) -> bool {
    let na = a.len();
    let nb = b.len();
    for i in 0..na {
        for j in 0..nb {
            if segments_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb]) {
                return true;
            }
        }
    }
    false
}

/// Signed distance to the workspace boundary sampled on a regular grid.
///
/// Values are positive inside the workspace and negative outside; the grid
/// covers the bounding box padded by one cell so every contour closes.
#[derive(Debug, Clone)]
pub struct DistanceField {
    pub origin: Point2,
    pub cell_size: f64,
    pub nx: usize,
    pub ny: usize,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.nx + ix]
    }

    pub fn grid_point(&self, ix: usize, iy: usize) -> Point2 {
        Point2::new(
            self.origin.x + ix as f64 * self.cell_size,
            self.origin.y + iy as f64 * self.cell_size,
        )
    }

    /// Largest interior clearance seen by the grid.
    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Sample the signed distance field for `ws` at grid pitch `cell_size`.
///
/// Every grid point stores the exact distance to the nearest boundary
/// segment, signed by the inside test.
pub fn build_distance_field(ws: &Workspace, cell_size: f64) -> Result<DistanceField, GeomError> {
    if !(cell_size > 0.0) || !cell_size.is_finite() {
        return Err(GeomError::InvalidParameter(format!(
            "cell_size must be positive, got {cell_size}"
        )));
    }
    let (min, max) = ws.bounding_box();
    let origin = Point2::new(min.x - cell_size, min.y - cell_size);
    let nx = ((max.x + cell_size - origin.x) / cell_size).ceil() as usize + 1;
    let ny = ((max.y + cell_size - origin.y) / cell_size).ceil() as usize + 1;
    let mut values = vec![0.0; nx * ny];
    for iy in 0..ny {
        for ix in 0..nx {
            let p = Point2::new(
                origin.x + ix as f64 * cell_size,
                origin.y + iy as f64 * cell_size,
            );
            let d = ws.boundary_distance(p);
            values[iy * nx + ix] = if ws.contains(p) { d } else { -d };
        }
    }
    Ok(DistanceField { origin, cell_size, nx, ny, values })
}

/// One closed contour at distance `layer * l` from the boundary, resampled to
/// equidistant points (counterclockwise).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Isoline {
    pub layer: u32,
    pub points: Vec<Point2>,
    /// Arc-length spacing between consecutive points.
    pub spacing: f64,
}

impl Isoline {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Point2 {
        self.points[i]
    }

    /// Index of the point preceding `i` in counterclockwise order.
    pub fn prev_index(&self, i: usize) -> usize {
        (i + self.points.len() - 1) % self.points.len()
    }

    /// Index of the point following `i` in counterclockwise order.
    pub fn next_index(&self, i: usize) -> usize {
        (i + 1) % self.points.len()
    }

    /// Closed perimeter through all points.
    pub fn perimeter(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| self.points[i].dist(self.points[(i + 1) % n]))
            .sum()
    }

    /// First point of the isoline; stable identity for ordering.
    pub fn first_point(&self) -> Point2 {
        self.points[0]
    }
}

impl fmt::Display for Isoline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "isoline(layer {}, {} pts, spacing {:.4})",
            self.layer,
            self.points.len(),
            self.spacing
        )
    }
}

/// Extract all isolines at levels `i * l` for `i = 1..=floor(max/l)`.
///
/// Contours shorter than 3 vertices, with enclosed area at or below
/// `(l/2)^2`, or with perimeter below `1.5 * l` are discarded. The result is
/// sorted by (layer, lexicographically smallest first point).
pub fn extract_isolines(field: &DistanceField, l: f64) -> Result<Vec<Isoline>, GeomError> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(GeomError::InvalidParameter(format!("l must be positive, got {l}")));
    }
    let l_max = field.max_value();
    let layers = ((l_max / l) + 1e-9).floor() as i64;
    if layers < 1 {
        return Err(GeomError::NoCoverableLayers { l_max, l });
    }
    let min_area = (l / 2.0) * (l / 2.0);
    let mut out = Vec::new();
    for layer in 1..=layers {
        let level = layer as f64 * l;
        for contour in marching_squares(field, level) {
            if contour.len() < 3 {
                continue;
            }
            if signed_area(&contour).abs() <= min_area {
                continue;
            }
            let raw = Isoline { layer: layer as u32, points: contour, spacing: 0.0 };
            match resample_equidistant(&raw, l) {
                Ok(iso) => out.push(iso),
                Err(GeomError::PerimeterTooSmall { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    out.sort_by(|a, b| {
        a.layer
            .cmp(&b.layer)
            .then_with(|| a.first_point().lex_cmp(b.first_point()))
    });
    Ok(out)
}

/// Resample a closed contour to `max(3, round(P/l))` points spaced exactly
/// `P/N` along the arc, counterclockwise, starting at the contour's
/// lexicographically smallest vertex.
pub fn resample_equidistant(iso: &Isoline, l: f64) -> Result<Isoline, GeomError> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(GeomError::InvalidParameter(format!("l must be positive, got {l}")));
    }
    let perimeter = iso.perimeter();
    let min = 1.5 * l;
    if perimeter < min {
        return Err(GeomError::PerimeterTooSmall { perimeter, min });
    }
    let mut ring: Vec<Point2> = iso.points.clone();
    if signed_area(&ring) < 0.0 {
        ring.reverse();
    }
    // Rotate so the walk starts at the lexicographically smallest vertex.
    let start = (0..ring.len())
        .min_by(|&a, &b| ring[a].lex_cmp(ring[b]))
        .unwrap();
    ring.rotate_left(start);

    let n_out = ((perimeter / l).round() as usize).max(3);
    let spacing = perimeter / n_out as f64;
    let n = ring.len();
    let mut points = Vec::with_capacity(n_out);
    let mut seg = 0usize; // current segment index
    let mut seg_start = 0.0; // arc length at start of current segment
    let mut seg_len = ring[0].dist(ring[1 % n]);
    for j in 0..n_out {
        let target = j as f64 * spacing;
        while seg_start + seg_len < target && seg < n {
            seg_start += seg_len;
            seg += 1;
            seg_len = ring[seg % n].dist(ring[(seg + 1) % n]);
        }
        let a = ring[seg % n];
        let b = ring[(seg + 1) % n];
        let t = if seg_len > 0.0 { (target - seg_start) / seg_len } else { 0.0 };
        points.push(a + (b - a) * t.clamp(0.0, 1.0));
    }
    Ok(Isoline { layer: iso.layer, points, spacing })
}

/// Grid-edge identity used to chain marching-squares segments exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct EdgeKey {
    x: u32,
    y: u32,
    horizontal: bool,
}

/// Pull closed contours of the level set `field = level` with linear
/// interpolation along grid edges. Saddle cells are disambiguated by the
/// sign of the cell-center mean.
fn marching_squares(field: &DistanceField, level: f64) -> Vec<Vec<Point2>> {
    use std::collections::BTreeMap;
    let mut links: BTreeMap<EdgeKey, Vec<EdgeKey>> = BTreeMap::new();
    let mut push_seg = |a: EdgeKey, b: EdgeKey| {
        links.entry(a).or_default().push(b);
        links.entry(b).or_default().push(a);
    };
    let bottom = |ix: usize, iy: usize| EdgeKey { x: ix as u32, y: iy as u32, horizontal: true };
    let top = |ix: usize, iy: usize| EdgeKey { x: ix as u32, y: iy as u32 + 1, horizontal: true };
    let left = |ix: usize, iy: usize| EdgeKey { x: ix as u32, y: iy as u32, horizontal: false };
    let right = |ix: usize, iy: usize| EdgeKey { x: ix as u32 + 1, y: iy as u32, horizontal: false };

    for iy in 0..field.ny - 1 {
        for ix in 0..field.nx - 1 {
            let v00 = field.value(ix, iy); // bottom-left
            let v10 = field.value(ix + 1, iy); // bottom-right
            let v11 = field.value(ix + 1, iy + 1); // top-right
            let v01 = field.value(ix, iy + 1); // top-left
            let mut case = 0u8;
            if v00 > level {
                case |= 1;
            }
            if v10 > level {
                case |= 2;
            }
            if v11 > level {
                case |= 4;
            }
            if v01 > level {
                case |= 8;
            }
            match case {
                0 | 15 => {}
                1 | 14 => push_seg(left(ix, iy), bottom(ix, iy)),
                2 | 13 => push_seg(bottom(ix, iy), right(ix, iy)),
                4 | 11 => push_seg(right(ix, iy), top(ix, iy)),
                8 | 7 => push_seg(top(ix, iy), left(ix, iy)),
                3 | 12 => push_seg(left(ix, iy), right(ix, iy)),
                6 | 9 => push_seg(bottom(ix, iy), top(ix, iy)),
                5 => {
                    // bottom-left and top-right above: saddle
                    let center = (v00 + v10 + v11 + v01) / 4.0;
                    if center > level {
                        push_seg(left(ix, iy), top(ix, iy));
                        push_seg(bottom(ix, iy), right(ix, iy));
                    } else {
                        push_seg(left(ix, iy), bottom(ix, iy));
                        push_seg(top(ix, iy), right(ix, iy));
                    }
                }
                10 => {
                    // bottom-right and top-left above: saddle
                    let center = (v00 + v10 + v11 + v01) / 4.0;
                    if center > level {
                        push_seg(left(ix, iy), bottom(ix, iy));
                        push_seg(top(ix, iy), right(ix, iy));
                    } else {
                        push_seg(left(ix, iy), top(ix, iy));
                        push_seg(bottom(ix, iy), right(ix, iy));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // Interpolated crossing point on each grid edge.
    let interp = |k: EdgeKey| -> Point2 {
        let (ix, iy) = (k.x as usize, k.y as usize);
        let a = field.grid_point(ix, iy);
        let (b, va, vb) = if k.horizontal {
            (field.grid_point(ix + 1, iy), field.value(ix, iy), field.value(ix + 1, iy))
        } else {
            (field.grid_point(ix, iy + 1), field.value(ix, iy), field.value(ix, iy + 1))
        };
        let t = ((level - va) / (vb - va)).clamp(0.0, 1.0);
        a + (b - a) * t
    };

    // Chain segments into closed loops; the padded grid guarantees closure.
    let mut visited: std::collections::BTreeSet<EdgeKey> = Default::default();
    let mut contours = Vec::new();
    let keys: Vec<EdgeKey> = links.keys().cloned().collect();
    for start in keys {
        if visited.contains(&start) || links[&start].len() != 2 {
            continue;
        }
        let mut loop_keys = vec![start];
        visited.insert(start);
        let mut prev = start;
        let mut cur = links[&start][0];
        let mut closed = false;
        while cur != start {
            if visited.contains(&cur) || links[&cur].len() != 2 {
                break;
            }
            visited.insert(cur);
            loop_keys.push(cur);
            let nbrs = &links[&cur];
            let next = if nbrs[0] == prev { nbrs[1] } else { nbrs[0] };
            prev = cur;
            cur = next;
        }
        closed |= cur == start;
        if closed && loop_keys.len() >= 3 {
            contours.push(loop_keys.iter().map(|&k| interp(k)).collect());
        }
    }
    contours
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Regular n-gon approximating a circle, counterclockwise.
    pub fn circle_ring(center: Point2, r: f64, n: usize) -> Vec<Point2> {
        (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Point2::new(center.x + r * a.cos(), center.y + r * a.sin())
            })
            .collect()
    }

    fn disc() -> Workspace {
        Workspace::new("disc", circle_ring(Point2::new(0.0, 0.0), 1.0, 256), vec![]).unwrap()
    }

    fn annulus() -> Workspace {
        Workspace::new(
            "annulus",
            circle_ring(Point2::new(0.0, 0.0), 2.0, 256),
            vec![circle_ring(Point2::new(0.0, 0.0), 1.0, 256)],
        )
        .unwrap()
    }

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

    #[test]
    fn orientation_normalized() {
        let mut ext = circle_ring(Point2::new(0.0, 0.0), 1.0, 16);
        ext.reverse(); // clockwise input
        let hole = circle_ring(Point2::new(0.0, 0.0), 0.3, 8); // counterclockwise input
        let ws = Workspace::new("w", ext, vec![hole]).unwrap();
        assert!(signed_area(&ws.exterior) > 0.0);
        assert!(signed_area(&ws.holes[0]) < 0.0);
    }

    #[test]
    fn degenerate_workspace_rejected() {
        let line = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ];
        assert!(matches!(
            Workspace::new("line", line, vec![]),
            Err(GeomError::DegenerateWorkspace(..))
        ));
    }

    #[test]
    fn hole_outside_rejected() {
        let ext = circle_ring(Point2::new(0.0, 0.0), 1.0, 32);
        let hole = circle_ring(Point2::new(5.0, 0.0), 0.3, 8);
        assert!(Workspace::new("w", ext, vec![hole]).is_err());
    }

    #[test]
    fn distance_field_disc_center() {
        let ws = disc();
        let field = build_distance_field(&ws, 0.05).unwrap();
        // Grid point nearest the center must read close to the radius.
        let mut best = (f64::INFINITY, 0.0);
        for iy in 0..field.ny {
            for ix in 0..field.nx {
                let p = field.grid_point(ix, iy);
                let d = p.dist(Point2::new(0.0, 0.0));
                if d < best.0 {
                    best = (d, field.value(ix, iy));
                }
            }
        }
        assert!((best.1 - 1.0).abs() < 0.05, "center distance {}", best.1);
    }

    #[test]
    fn distance_field_square_values() {
        let ws = square(2.0);
        let field = build_distance_field(&ws, 0.05).unwrap();
        // Exact grid point at the center: clearance 1.
        let find = |q: Point2| -> f64 {
            let ix = ((q.x - field.origin.x) / field.cell_size).round() as usize;
            let iy = ((q.y - field.origin.y) / field.cell_size).round() as usize;
            field.value(ix, iy)
        };
        assert!((find(Point2::new(0.0, 0.0)) - 1.0).abs() < 1e-9);
        assert!((find(Point2::new(0.9, 0.9)) - 0.1).abs() < 1e-9);
        // Outside the square the sign flips.
        assert!(find(Point2::new(-1.05, -1.05)) < 0.0);
    }

    #[test]
    fn distance_field_annulus_ridge() {
        let ws = annulus();
        let field = build_distance_field(&ws, 0.05).unwrap();
        let ix = ((1.5 - field.origin.x) / field.cell_size).round() as usize;
        let iy = ((0.0 - field.origin.y) / field.cell_size).round() as usize;
        let mid = field.value(ix, iy);
        assert!((mid - 0.5).abs() < 0.05, "ridge clearance {mid}");
    }

    #[test]
    fn distance_field_is_lipschitz() {
        let ws = disc();
        let field = build_distance_field(&ws, 0.1).unwrap();
        let bound = field.cell_size * std::f64::consts::SQRT_2 + 1e-9;
        for iy in 0..field.ny {
            for ix in 0..field.nx {
                if ix + 1 < field.nx {
                    assert!((field.value(ix, iy) - field.value(ix + 1, iy)).abs() <= bound);
                }
                if iy + 1 < field.ny {
                    assert!((field.value(ix, iy) - field.value(ix, iy + 1)).abs() <= bound);
                }
            }
        }
    }

    #[test]
    fn disc_isolines_are_three_rings() {
        let ws = disc();
        let l = 0.3;
        let field = build_distance_field(&ws, l / 4.0).unwrap();
        let isolines = extract_isolines(&field, l).unwrap();
        assert_eq!(isolines.len(), 3);
        let expected = [0.7, 0.4, 0.1];
        for (iso, expect_r) in isolines.iter().zip(expected) {
            for p in &iso.points {
                let r = p.dist(Point2::new(0.0, 0.0));
                assert!(
                    (r - expect_r).abs() <= 0.05,
                    "layer {} point at radius {r}, expected {expect_r}",
                    iso.layer
                );
            }
        }
    }

    #[test]
    fn annulus_isolines_two_per_layer() {
        let ws = annulus();
        let l = 0.2;
        let field = build_distance_field(&ws, l / 4.0).unwrap();
        let isolines = extract_isolines(&field, l).unwrap();
        assert_eq!(isolines.len(), 4);
        let mut radii: Vec<(u32, f64)> = isolines
            .iter()
            .map(|iso| {
                let mean = iso
                    .points
                    .iter()
                    .map(|p| p.dist(Point2::new(0.0, 0.0)))
                    .sum::<f64>()
                    / iso.len() as f64;
                (iso.layer, mean)
            })
            .collect();
        radii.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap()));
        let expect = [(1, 1.2), (1, 1.8), (2, 1.4), (2, 1.6)];
        for ((layer, r), (e_layer, e_r)) in radii.iter().zip(expect) {
            assert_eq!(*layer, e_layer);
            assert!((r - e_r).abs() < 0.05, "layer {layer} radius {r} expected {e_r}");
        }
    }

    #[test]
    fn no_coverable_layers_is_an_error() {
        let ws = square(2.0);
        let field = build_distance_field(&ws, 0.05).unwrap();
        assert!(matches!(
            extract_isolines(&field, 1.5),
            Err(GeomError::NoCoverableLayers { .. })
        ));
    }

    #[test]
    fn isoline_count_monotone_in_l() {
        let ws = disc();
        let mut counts = Vec::new();
        for l in [0.15, 0.2, 0.3, 0.45] {
            let field = build_distance_field(&ws, l / 4.0).unwrap();
            counts.push(extract_isolines(&field, l).unwrap().len());
        }
        for w in counts.windows(2) {
            assert!(w[0] >= w[1], "counts not non-increasing: {counts:?}");
        }
    }

    #[test]
    fn isolines_stay_near_their_level() {
        let ws = annulus();
        let l = 0.2;
        let field = build_distance_field(&ws, l / 4.0).unwrap();
        for iso in extract_isolines(&field, l).unwrap() {
            let want = iso.layer as f64 * l;
            for p in &iso.points {
                let d = ws.boundary_distance(*p);
                assert!(
                    (d - want).abs() <= 0.25 * l,
                    "layer {} point at clearance {d}, want {want}",
                    iso.layer
                );
            }
        }
    }

    #[test]
    fn resample_circle_point_count_and_spacing() {
        let raw = Isoline {
            layer: 1,
            points: circle_ring(Point2::new(0.0, 0.0), 0.7, 1000),
            spacing: 0.0,
        };
        let iso = resample_equidistant(&raw, 0.1).unwrap();
        assert_eq!(iso.len(), 44);
        assert!((iso.spacing - 0.09996).abs() < 1e-4, "spacing {}", iso.spacing);
        // Arc-length spacing is exact by construction; chord lengths on a
        // circle must all agree with each other.
        let chords: Vec<f64> = (0..iso.len())
            .map(|i| iso.points[i].dist(iso.points[iso.next_index(i)]))
            .collect();
        let mean = chords.iter().sum::<f64>() / chords.len() as f64;
        for c in &chords {
            assert!((c - mean).abs() / mean < 0.01);
        }
    }

    #[test]
    fn resample_is_idempotent_on_circles() {
        let raw = Isoline {
            layer: 1,
            points: circle_ring(Point2::new(0.0, 0.0), 0.7, 1000),
            spacing: 0.0,
        };
        let once = resample_equidistant(&raw, 0.1).unwrap();
        let twice = resample_equidistant(&once, 0.1).unwrap();
        assert_eq!(once.len(), twice.len());
        assert!((once.spacing - twice.spacing).abs() / once.spacing < 0.01);
    }

    #[test]
    fn resample_small_triangle_keeps_three_points() {
        let raw = Isoline {
            layer: 1,
            points: vec![
                Point2::new(0.0, 0.0),
                Point2::new(0.1, 0.0),
                Point2::new(0.05, 0.0866),
            ],
            spacing: 0.0,
        };
        let iso = resample_equidistant(&raw, 0.1).unwrap();
        assert_eq!(iso.len(), 3);
    }

    #[test]
    fn resample_rejects_tiny_perimeter() {
        let raw = Isoline {
            layer: 1,
            points: vec![
                Point2::new(0.0, 0.0),
                Point2::new(0.04, 0.0),
                Point2::new(0.02, 0.03),
            ],
            spacing: 0.0,
        };
        assert!(matches!(
            resample_equidistant(&raw, 0.1),
            Err(GeomError::PerimeterTooSmall { .. })
        ));
    }

    #[test]
    fn resample_forces_counterclockwise() {
        let mut ring = circle_ring(Point2::new(0.0, 0.0), 0.5, 100);
        ring.reverse(); // clockwise raw contour
        let raw = Isoline { layer: 1, points: ring, spacing: 0.0 };
        let iso = resample_equidistant(&raw, 0.1).unwrap();
        assert!(signed_area(&iso.points) > 0.0);
    }

    #[test]
    fn resample_starts_at_lex_smallest_vertex() {
        let raw = Isoline {
            layer: 1,
            points: circle_ring(Point2::new(0.0, 0.0), 0.7, 1000),
            spacing: 0.0,
        };
        let iso = resample_equidistant(&raw, 0.1).unwrap();
        let lex_min = raw
            .points
            .iter()
            .cloned()
            .min_by(|a, b| a.lex_cmp(*b))
            .unwrap();
        assert!(iso.points[0].dist(lex_min) < 1e-9);
    }

    #[test]
    fn resample_conserves_perimeter() {
        let raw = Isoline {
            layer: 1,
            points: circle_ring(Point2::new(0.0, 0.0), 0.7, 1000),
            spacing: 0.0,
        };
        let iso = resample_equidistant(&raw, 0.1).unwrap();
        let total = iso.spacing * iso.len() as f64;
        assert!((total - raw.perimeter()).abs() / raw.perimeter() < 1e-9);
    }

    #[test]
    fn same_layer_isolines_disjoint() {
        let ws = annulus();
        let l = 0.2;
        let field = build_distance_field(&ws, l / 4.0).unwrap();
        let isolines = extract_isolines(&field, l).unwrap();
        for i in 0..isolines.len() {
            for j in (i + 1)..isolines.len() {
                if isolines[i].layer != isolines[j].layer {
                    continue;
                }
                let min_gap = isolines[i]
                    .points
                    .iter()
                    .map(|p| point_ring_distance(*p, &isolines[j].points))
                    .fold(f64::INFINITY, f64::min);
                assert!(min_gap > l / 2.0, "same-layer isolines closer than l/2");
            }
        }
    }
}
