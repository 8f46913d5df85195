//! Planar primitives: vectors, segments, polygons and the shared numeric tolerance.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Absolute tolerance used by exact-geometry predicates.
pub fn tolerance() -> f64 {
    f64::from_bits(TOLERANCE_BITS.load(Ordering::Relaxed))
}

/// Replaces the global tolerance. Non-positive or non-finite values are ignored.
pub fn set_tolerance(tol: f64) {
    if tol.is_finite() && tol > 0.0 {
        TOLERANCE_BITS.store(tol.to_bits(), Ordering::Relaxed);
    }
}

/// A 2D point or vector in pattern units (pixels).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

pub type Point = Vec2;

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Vec2 { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };
    pub const X: Vec2 = Vec2 { x: 1.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(angle: f64) -> Self {
        Vec2::new(angle.cos(), angle.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product; positive when `o` is counter-clockwise of `self`.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Unit vector, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Vec2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Folds an angle onto the undirected-line range (-π/2, π/2].
pub fn normalize_line_angle(angle: f64) -> f64 {
    let mut a = angle % PI;
    if a > FRAC_PI_2 {
        a -= PI;
    } else if a <= -FRAC_PI_2 {
        a += PI;
    }
    a
}

/// Signed acute angle that rotates the undirected line `from` onto `to`, in (-π/2, π/2].
pub fn signed_line_angle(from: Vec2, to: Vec2) -> f64 {
    normalize_line_angle(from.cross(to).atan2(from.dot(to)))
}

/// A straight segment. May be degenerate where an operation allows it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSeg {
    pub p0: Point,
    pub p1: Point,
}

impl LineSeg {
    pub const fn new(p0: Point, p1: Point) -> Self {
        LineSeg { p0, p1 }
    }

    pub fn length(&self) -> f64 {
        self.p0.distance(self.p1)
    }

    pub fn midpoint(&self) -> Point {
        self.p0.lerp(self.p1, 0.5)
    }

    pub fn direction(&self) -> Option<Vec2> {
        (self.p1 - self.p0).normalized()
    }

    pub fn at(&self, t: f64) -> Point {
        self.p0.lerp(self.p1, t)
    }

    /// Exact euclidean distance from `p` to the closed segment.
    pub fn distance_to(&self, p: Point) -> f64 {
        let d = self.p1 - self.p0;
        let len2 = d.norm_squared();
        if len2 == 0.0 {
            return p.distance(self.p0);
        }
        let t = ((p - self.p0).dot(d) / len2).clamp(0.0, 1.0);
        p.distance(self.p0 + d * t)
    }

    /// Minimum distance between two closed segments.
    pub fn distance_to_segment(&self, o: &LineSeg) -> f64 {
        if segments_intersect(self, o) {
            return 0.0;
        }
        self.distance_to(o.p0)
            .min(self.distance_to(o.p1))
            .min(o.distance_to(self.p0))
            .min(o.distance_to(self.p1))
    }
}

fn segments_intersect(a: &LineSeg, b: &LineSeg) -> bool {
    let d1 = (a.p1 - a.p0).cross(b.p0 - a.p0);
    let d2 = (a.p1 - a.p0).cross(b.p1 - a.p0);
    let d3 = (b.p1 - b.p0).cross(a.p0 - b.p0);
    let d4 = (b.p1 - b.p0).cross(a.p1 - b.p0);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Shoelace signed area (counter-clockwise positive).
pub fn polygon_signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut a = 0.0;
    for i in 0..n {
        a += poly[i].cross(poly[(i + 1) % n]);
    }
    0.5 * a
}

/// Area centroid of a polygon ring. Falls back to the vertex mean for zero-area rings.
pub fn polygon_centroid(poly: &[Point]) -> Option<Point> {
    if poly.is_empty() {
        return None;
    }
    let n = poly.len();
    let mut a = 0.0;
    let mut c = Vec2::ZERO;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let w = p.cross(q);
        a += w;
        c += (p + q) * w;
    }
    if a.abs() <= f64::EPSILON * bbox_scale(poly).powi(2) {
        let sum = poly.iter().fold(Vec2::ZERO, |s, &p| s + p);
        return Some(sum / n as f64);
    }
    Some(c / (3.0 * a))
}

fn bbox_scale(poly: &[Point]) -> f64 {
    bounding_box(poly)
        .map(|(lo, hi)| (hi - lo).norm())
        .unwrap_or(0.0)
        .max(1.0)
}

pub fn bounding_box(points: &[Point]) -> Option<(Point, Point)> {
    let first = *points.first()?;
    Some(points.iter().fold((first, first), |(lo, hi), p| {
        (
            Vec2::new(lo.x.min(p.x), lo.y.min(p.y)),
            Vec2::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    }))
}

/// Even-odd point-in-polygon test; boundary points count as inside.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if LineSeg::new(a, b).distance_to(p) <= tolerance() {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Keeps the part of `poly` where `(p - origin)·normal <= 0` (Sutherland-Hodgman, one plane).
///
/// Works for non-convex input; the output may contain zero-width bridges, which leave
/// area and centroid integrals unaffected.
pub fn clip_half_plane(poly: &[Point], origin: Point, normal: Vec2) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    if n == 0 {
        return out;
    }
    let side = |p: Point| (p - origin).dot(normal);
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let sc = side(cur);
        let sn = side(next);
        if sc <= 0.0 {
            out.push(cur);
        }
        if (sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0) {
            let t = sc / (sc - sn);
            out.push(cur.lerp(next, t));
        }
    }
    out
}

/// True if no two non-adjacent edges of the ring intersect.
pub fn is_simple_polygon(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let a = LineSeg::new(poly[i], poly[(i + 1) % n]);
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let b = LineSeg::new(poly[j], poly[(j + 1) % n]);
            if a.distance_to_segment(&b) <= tolerance() {
                return false;
            }
        }
    }
    true
}
