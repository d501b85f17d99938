//! Convex polygon primitives.
//!
//! Everything here works on small, immutable values. Coordinates are assumed
//! to be O(10^3) in magnitude and every predicate uses the absolute tolerance
//! [`EPS`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance shared by the geometric predicates.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 distinct vertices, got {count}")]
    TooFewVertices { count: usize },
    #[error("polygon is not convex at vertex {index}")]
    NotConvex { index: usize },
    #[error("polygon vertices are in clockwise order")]
    Clockwise,
    #[error("polygon has zero area")]
    Degenerate,
    #[error("non-finite coordinate at vertex {index}")]
    NonFinite { index: usize },
    #[error("erosion radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("workspace erodes to an empty or degenerate region")]
    EmptyWorkspace,
    #[error("point ({x}, {y}) lies outside the polygon")]
    PointOutside { x: f64, y: f64 },
    #[error("chord has zero length")]
    DegenerateChord,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction. Zero vectors stay zero.
    pub fn normalized(self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self * (1.0 / n)
        }
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn lex_cmp(self, other: Point) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A closed straight segment; also used for swept paths of moving players.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn closest_point(&self, p: Point) -> Point {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 == 0.0 {
            return self.a;
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        self.a + d * t
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        self.closest_point(p).distance(p)
    }
}

/// Which side of a directed line a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Positive,
    Negative,
    OnLine,
}

/// Maximal segment of a convex polygon; both endpoints on the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chord {
    pub a: Point,
    pub b: Point,
}

impl Chord {
    pub fn new(a: Point, b: Point) -> Result<Self, GeometryError> {
        if a.distance(b) <= EPS {
            return Err(GeometryError::DegenerateChord);
        }
        Ok(Self { a, b })
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    /// Unit vector from `a` to `b`.
    pub fn direction(&self) -> Point {
        (self.b - self.a).normalized()
    }

    pub fn segment(&self) -> Segment {
        Segment::new(self.a, self.b)
    }

    /// Signed coordinate of `p` along the chord, measured from `a`.
    pub fn param_of(&self, p: Point) -> f64 {
        (p - self.a).dot(self.direction())
    }

    pub fn point_at(&self, s: f64) -> Point {
        self.a + self.direction() * s
    }

    /// Whether the coordinate `s` lies on the closed chord, up to `tol`.
    pub fn covers(&self, s: f64, tol: f64) -> bool {
        s >= -tol && s <= self.length() + tol
    }
}

/// Counter-clockwise, strictly convex polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Validates and normalizes a counter-clockwise vertex list.
    ///
    /// Repeated vertices (within [`EPS`]) are merged and collinear vertices
    /// dropped. A reflex turn is reported with its index in `vertices`.
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if let Some(index) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite { index });
        }

        // Keep original indices so diagnostics point at the caller's input.
        let mut pts: Vec<(usize, Point)> = Vec::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            if pts.last().is_some_and(|&(_, last)| last.distance(v) <= EPS) {
                continue;
            }
            pts.push((i, v));
        }
        while pts.len() > 1 && pts[0].1.distance(pts[pts.len() - 1].1) <= EPS {
            pts.pop();
        }
        if pts.len() < 3 {
            return Err(GeometryError::TooFewVertices { count: pts.len() });
        }

        let area = signed_area(pts.iter().map(|&(_, p)| p));
        if area.abs() <= EPS {
            return Err(GeometryError::Degenerate);
        }
        if area < 0.0 {
            return Err(GeometryError::Clockwise);
        }

        let n = pts.len();
        for k in 0..n {
            let prev = pts[(k + n - 1) % n].1;
            let (index, cur) = pts[k];
            let next = pts[(k + 1) % n].1;
            if (cur - prev).cross(next - cur) < -EPS {
                return Err(GeometryError::NotConvex { index });
            }
        }

        let mut verts: Vec<Point> = pts.into_iter().map(|(_, p)| p).collect();
        drop_collinear(&mut verts);
        if verts.len() < 3 {
            return Err(GeometryError::Degenerate);
        }

        // Left turns everywhere can still wind more than once (a pentagram).
        let turning: f64 = (0..verts.len())
            .map(|k| {
                let n = verts.len();
                let e1 = verts[k] - verts[(k + n - 1) % n];
                let e2 = verts[(k + 1) % n] - verts[k];
                e1.cross(e2).atan2(e1.dot(e2))
            })
            .sum();
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(GeometryError::NotConvex { index: 0 });
        }

        Ok(Self { vertices: verts })
    }

    /// Axis-aligned rectangle with corners `min` and `max`.
    pub fn rectangle(min: Point, max: Point) -> Result<Self, GeometryError> {
        Self::new(vec![
            min,
            Point::new(max.x, min.y),
            max,
            Point::new(min.x, max.y),
        ])
    }

    /// Regular polygon with `n` vertices, the first at angle `phase`.
    pub fn regular(n: usize, center: Point, circumradius: f64, phase: f64) -> Result<Self, GeometryError> {
        Self::new(
            (0..n)
                .map(|k| {
                    let t = phase + std::f64::consts::TAU * k as f64 / n as f64;
                    center + Point::from_angle(t) * circumradius
                })
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(self.vertices.iter().copied())
    }

    /// Smallest signed distance from `p` to the edge lines; positive inside.
    pub fn depth(&self, p: Point) -> f64 {
        self.edges()
            .map(|e| (e.b - e.a).cross(p - e.a) / e.length())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.depth(p) >= -tol
    }

    /// Parameter interval `[lo, hi]` of the line `point + t·dir` inside the polygon.
    pub fn clip_line(&self, point: Point, dir: Point) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for e in self.edges() {
            let edge = e.b - e.a;
            let c0 = edge.cross(point - e.a);
            let c1 = edge.cross(dir);
            if c1.abs() <= f64::EPSILON * edge.norm() * dir.norm() {
                if c0 < -EPS * edge.norm() {
                    return None;
                }
                continue;
            }
            let t = -c0 / c1;
            if c1 > 0.0 {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
        }
        (lo <= hi && lo.is_finite() && hi.is_finite()).then_some((lo, hi))
    }

    /// Length of the longest chord.
    pub fn diameter(&self) -> f64 {
        longest_chord(self).length()
    }
}

fn signed_area(points: impl Iterator<Item = Point> + Clone) -> f64 {
    let first = points.clone().next();
    let mut sum = 0.0;
    let mut prev: Option<Point> = None;
    for p in points {
        if let Some(q) = prev {
            sum += q.cross(p);
        }
        prev = Some(p);
    }
    if let (Some(last), Some(first)) = (prev, first) {
        sum += last.cross(first);
    }
    0.5 * sum
}

fn drop_collinear(verts: &mut Vec<Point>) {
    loop {
        let n = verts.len();
        if n < 3 {
            return;
        }
        let hit = (0..n).find(|&k| {
            let prev = verts[(k + n - 1) % n];
            let next = verts[(k + 1) % n];
            (verts[k] - prev).cross(next - verts[k]).abs() <= EPS
        });
        match hit {
            Some(k) => {
                verts.remove(k);
            }
            None => return,
        }
    }
}

/// Inward offset of `workspace` by `radius`: the set of points at distance at
/// least `radius` from its boundary.
pub fn erode(workspace: &ConvexPolygon, radius: f64) -> Result<ConvexPolygon, GeometryError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(GeometryError::InvalidRadius(radius));
    }
    let mut region: Vec<Point> = workspace.vertices.clone();
    for edge in workspace.edges() {
        let e = edge.b - edge.a;
        let len = e.norm();
        let inside = |p: Point| e.cross(p - edge.a) / len - radius;
        region = clip_half_plane(&region, inside);
        if region.is_empty() {
            return Err(GeometryError::EmptyWorkspace);
        }
    }

    let mut merged: Vec<Point> = Vec::with_capacity(region.len());
    for p in region {
        if merged.last().is_some_and(|&q: &Point| q.distance(p) <= EPS) {
            continue;
        }
        merged.push(p);
    }
    while merged.len() > 1 && merged[0].distance(merged[merged.len() - 1]) <= EPS {
        merged.pop();
    }
    if merged.len() < 3 || signed_area(merged.iter().copied()) <= EPS {
        return Err(GeometryError::EmptyWorkspace);
    }
    ConvexPolygon::new(merged).map_err(|_| GeometryError::EmptyWorkspace)
}

/// One Sutherland-Hodgman pass keeping points where `f >= 0`.
fn clip_half_plane(poly: &[Point], f: impl Fn(Point) -> f64) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let fc = f(cur);
        let fn_ = f(next);
        if fc >= 0.0 {
            out.push(cur);
        }
        if (fc >= 0.0) != (fn_ >= 0.0) {
            let t = fc / (fc - fn_);
            out.push(cur + (next - cur) * t);
        }
    }
    out
}

/// A diameter of `q`, found with rotating calipers over antipodal vertex pairs.
///
/// When several pairs realize the diameter (within [`EPS`]) the
/// lexicographically smallest `(a, b)` pair wins, with `a <= b`.
pub fn longest_chord(q: &ConvexPolygon) -> Chord {
    let v = q.vertices();
    let n = v.len();
    let twice_area = |i: usize, j: usize, k: usize| (v[j] - v[i]).cross(v[k] - v[i]).abs();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut j = 1;
    for i in 0..n {
        let ni = (i + 1) % n;
        let mut guard = 0;
        while twice_area(i, ni, (j + 1) % n) > twice_area(i, ni, j) + EPS && guard < n {
            j = (j + 1) % n;
            guard += 1;
        }
        pairs.push((i, j));
        pairs.push((ni, j));
        // Parallel edges give a second antipodal vertex.
        if (twice_area(i, ni, (j + 1) % n) - twice_area(i, ni, j)).abs() <= EPS {
            pairs.push((i, (j + 1) % n));
            pairs.push((ni, (j + 1) % n));
        }
    }

    let best = pairs
        .iter()
        .map(|&(i, k)| v[i].distance(v[k]))
        .fold(0.0_f64, f64::max);

    pairs
        .into_iter()
        .filter(|&(i, k)| i != k && v[i].distance(v[k]) >= best - EPS)
        .map(|(i, k)| {
            if v[i].lex_cmp(v[k]) == Ordering::Greater {
                (v[k], v[i])
            } else {
                (v[i], v[k])
            }
        })
        .min_by(|x, y| x.0.lex_cmp(y.0).then_with(|| x.1.lex_cmp(y.1)))
        .map(|(a, b)| Chord { a, b })
        .expect("a valid polygon has at least one antipodal pair")
}

/// Maximal segment of `q` through `point` along `direction`.
pub fn chord_through(q: &ConvexPolygon, point: Point, direction: Point) -> Result<Chord, GeometryError> {
    if !q.contains(point, EPS) {
        return Err(GeometryError::PointOutside { x: point.x, y: point.y });
    }
    let dir = direction.normalized();
    let (lo, hi) = q
        .clip_line(point, dir)
        .ok_or(GeometryError::PointOutside { x: point.x, y: point.y })?;
    Chord::new(point + dir * lo, point + dir * hi)
}

pub fn closest_point_on_segment(p: Point, s: &Segment) -> Point {
    s.closest_point(p)
}

/// Sign of `(b - a) x (p - a)`; magnitudes up to [`EPS`] count as on the line.
pub fn side_of(p: Point, line: &Segment) -> Side {
    let v = (line.b - line.a).cross(p - line.a);
    if v > EPS {
        Side::Positive
    } else if v < -EPS {
        Side::Negative
    } else {
        Side::OnLine
    }
}

/// Closest approach between a stationary player and another player moving
/// along `path`.
pub fn min_distance_point_to_swept_segment(stationary: Point, path: &Segment) -> f64 {
    path.distance_to(stationary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(side: f64) -> ConvexPolygon {
        ConvexPolygon::rectangle(Point::ORIGIN, Point::new(side, side)).unwrap()
    }

    fn approx(a: Point, b: Point, tol: f64) -> bool {
        a.distance(b) <= tol
    }

    #[test]
    fn erode_square_is_axis_aligned_offset() {
        let q = erode(&square(6.0), 1.0).unwrap();
        assert_eq!(q.len(), 4);
        for expected in [Point::new(1.0, 1.0), Point::new(5.0, 1.0), Point::new(5.0, 5.0), Point::new(1.0, 5.0)] {
            assert!(q.vertices().iter().any(|&v| approx(v, expected, 1e-12)), "missing {expected}");
        }
    }

    #[test]
    fn erode_equilateral_triangle_matches_homothety() {
        let s = 4.0_f64;
        let tri = ConvexPolygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(s, 0.0),
            Point::new(s / 2.0, s * 3f64.sqrt() / 2.0),
        ])
        .unwrap();
        let q = erode(&tri, 1.0).unwrap();
        assert_eq!(q.len(), 3);

        // Oracle: the offset of a triangle is its homothety about the incenter
        // with ratio (inradius - r) / inradius.
        let incenter = Point::new(s / 2.0, s / (2.0 * 3f64.sqrt()));
        let inradius = s / (2.0 * 3f64.sqrt());
        let ratio = (inradius - 1.0) / inradius;
        for &v in tri.vertices() {
            let expected = incenter + (v - incenter) * ratio;
            assert!(q.vertices().iter().any(|&w| approx(w, expected, 1e-9)));
        }
        let side = q.vertices()[0].distance(q.vertices()[1]);
        assert!((side - (4.0 - 2.0 * 3f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn erode_too_thin_is_empty() {
        assert_eq!(erode(&square(1.5), 1.0), Err(GeometryError::EmptyWorkspace));
        // inradius exactly equal to the radius collapses to a point
        assert_eq!(erode(&square(2.0), 1.0), Err(GeometryError::EmptyWorkspace));
        assert_eq!(erode(&square(4.0), 0.0), Err(GeometryError::InvalidRadius(0.0)));
    }

    #[test]
    fn longest_chord_examples() {
        let rect = ConvexPolygon::rectangle(Point::ORIGIN, Point::new(4.0, 3.0)).unwrap();
        let c = longest_chord(&rect);
        assert_eq!((c.a, c.b), (Point::new(0.0, 0.0), Point::new(4.0, 3.0)));
        assert_eq!(c.length(), 5.0);

        let c = longest_chord(&square(1.0));
        assert_eq!((c.a, c.b), (Point::new(0.0, 0.0), Point::new(1.0, 1.0)));

        let hex = ConvexPolygon::regular(6, Point::ORIGIN, 2.0, 0.0).unwrap();
        let c = longest_chord(&hex);
        assert!((c.length() - 4.0).abs() < 1e-12);
        assert!((c.a + c.b).norm() < 1e-12, "opposite vertices");
    }

    #[test]
    fn chord_through_examples() {
        let q = square(4.0);
        let c = chord_through(&q, Point::new(2.0, 2.0), Point::new(1.0, 0.0)).unwrap();
        assert!(approx(c.a, Point::new(0.0, 2.0), 1e-12) && approx(c.b, Point::new(4.0, 2.0), 1e-12));
        let c = chord_through(&q, Point::new(2.0, 2.0), Point::new(1.0, 1.0)).unwrap();
        assert!(approx(c.a, Point::new(0.0, 0.0), 1e-12) && approx(c.b, Point::new(4.0, 4.0), 1e-12));
        assert!(matches!(
            chord_through(&q, Point::new(5.0, 5.0), Point::new(1.0, 0.0)),
            Err(GeometryError::PointOutside { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(10.0, 0.0));
        assert_eq!(closest_point_on_segment(Point::new(3.0, 4.0), &s), Point::new(3.0, 0.0));
        assert_eq!(closest_point_on_segment(Point::new(-2.0, 5.0), &s), Point::new(0.0, 0.0));
        assert_eq!(closest_point_on_segment(Point::new(7.5, 0.0), &s), Point::new(7.5, 0.0));
    }

    #[test]
    fn side_examples() {
        let l = Segment::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        assert_eq!(side_of(Point::new(0.0, 1.0), &l), Side::Positive);
        assert_eq!(side_of(Point::new(0.0, -1.0), &l), Side::Negative);
        assert_eq!(side_of(Point::new(0.5, 0.0), &l), Side::OnLine);
    }

    #[test]
    fn swept_distance_examples() {
        let path = Segment::new(Point::new(-3.0, 0.0), Point::new(3.0, 0.0));
        assert_eq!(min_distance_point_to_swept_segment(Point::new(0.0, 2.0), &path), 2.0);
        let path = Segment::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        assert_eq!(min_distance_point_to_swept_segment(Point::new(5.0, 0.0), &path), 4.0);
        assert_eq!(min_distance_point_to_swept_segment(Point::new(0.25, 0.0), &path), 0.0);
    }

    #[test]
    fn polygon_validation() {
        let bad = vec![Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(2.0, 1.0), Point::new(2.0, 4.0)];
        assert_eq!(ConvexPolygon::new(bad), Err(GeometryError::NotConvex { index: 2 }));

        let cw = vec![Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 1.0), Point::new(1.0, 0.0)];
        assert_eq!(ConvexPolygon::new(cw), Err(GeometryError::Clockwise));

        assert!(matches!(
            ConvexPolygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0)]),
            Err(GeometryError::TooFewVertices { count: 2 })
        ));

        // collinear and repeated vertices are merged away
        let q = ConvexPolygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(2.0, 2.0),
            Point::new(0.0, 2.0),
        ])
        .unwrap();
        assert_eq!(q.len(), 4);

        let star: Vec<Point> = (0..5)
            .map(|k| Point::from_angle(std::f64::consts::TAU * 2.0 * k as f64 / 5.0))
            .collect();
        assert!(matches!(ConvexPolygon::new(star), Err(GeometryError::NotConvex { .. })));
    }
}
