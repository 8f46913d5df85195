//! Synthesis targets: guide paths (1D) and simple polygons (2D).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    bounding_box, is_simple_polygon, point_in_polygon, polygon_centroid, polygon_signed_area,
    Point, Vec2,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetRegion {
    /// Elements are laid out along the polyline, parameterized by arc length.
    Path { points: Vec<Point> },
    /// Elements fill a simple polygon.
    Polygon { points: Vec<Point> },
}

impl TargetRegion {
    pub fn path(points: Vec<Point>) -> Result<Self> {
        let r = TargetRegion::Path { points };
        r.validate()?;
        Ok(r)
    }

    pub fn polygon(points: Vec<Point>) -> Result<Self> {
        let r = TargetRegion::Polygon { points };
        r.validate()?;
        Ok(r)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        TargetRegion::polygon(vec![
            Vec2::new(x0, y0),
            Vec2::new(x1, y0),
            Vec2::new(x1, y1),
            Vec2::new(x0, y1),
        ])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TargetRegion::Path { points } => {
                if points.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidGeometry("non-finite path vertex".into()));
                }
                if self.measure() <= 0.0 {
                    return Err(Error::InvalidGeometry("path has zero length".into()));
                }
            }
            TargetRegion::Polygon { points } => {
                if points.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidGeometry("non-finite polygon vertex".into()));
                }
                if polygon_signed_area(points).abs() <= 0.0 {
                    return Err(Error::InvalidGeometry("polygon has zero area".into()));
                }
                if !is_simple_polygon(points) {
                    return Err(Error::InvalidGeometry("polygon self-intersects".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_path(&self) -> bool {
        matches!(self, TargetRegion::Path { .. })
    }

    /// Path length (px) or polygon area (px²).
    pub fn measure(&self) -> f64 {
        match self {
            TargetRegion::Path { points } => {
                points.windows(2).map(|w| w[0].distance(w[1])).sum()
            }
            TargetRegion::Polygon { points } => polygon_signed_area(points).abs(),
        }
    }

    pub fn centroid(&self) -> Point {
        match self {
            TargetRegion::Path { points } => PathParam::new(points).point_at(0.5 * self.measure()),
            TargetRegion::Polygon { points } => polygon_centroid(points).unwrap_or(Vec2::ZERO),
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match self {
            TargetRegion::Polygon { points } => point_in_polygon(p, points),
            TargetRegion::Path { .. } => false,
        }
    }

    /// The same region scaled by `k` about its centroid.
    pub fn scaled(&self, k: f64) -> TargetRegion {
        let c = self.centroid();
        let map = |pts: &Vec<Point>| pts.iter().map(|&p| c + (p - c) * k).collect();
        match self {
            TargetRegion::Path { points } => TargetRegion::Path { points: map(points) },
            TargetRegion::Polygon { points } => TargetRegion::Polygon { points: map(points) },
        }
    }

    /// Uniform random point inside the polygon (rejection sampling in the bounding box).
    pub(crate) fn sample_inside<R: Rng>(&self, points: &[Point], rng: &mut R) -> Point {
        let (lo, hi) = bounding_box(points).unwrap_or((Vec2::ZERO, Vec2::ZERO));
        loop {
            let p = Vec2::new(
                lo.x + (hi.x - lo.x) * rng.random::<f64>(),
                lo.y + (hi.y - lo.y) * rng.random::<f64>(),
            );
            if point_in_polygon(p, points) {
                return p;
            }
        }
    }
}

/// Arc-length parameterization of a polyline. Parameters outside `[0, length]` extrapolate
/// along the end segments.
#[derive(Debug, Clone)]
pub struct PathParam<'a> {
    points: &'a [Point],
    cumulative: Vec<f64>,
}

impl<'a> PathParam<'a> {
    pub fn new(points: &'a [Point]) -> Self {
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in points.windows(2) {
            acc += w[0].distance(w[1]);
            cumulative.push(acc);
        }
        PathParam { points, cumulative }
    }

    pub fn length(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Index of the non-degenerate segment that carries parameter `t`.
    fn segment(&self, t: f64) -> usize {
        let last = self.points.len().saturating_sub(2);
        let k = self.cumulative.partition_point(|&c| c <= t).saturating_sub(1).min(last);
        // Skip zero-length segments so tangents are defined.
        let mut k2 = k;
        while k2 < last && self.cumulative[k2 + 1] - self.cumulative[k2] <= 0.0 {
            k2 += 1;
        }
        while k2 > 0 && self.cumulative[k2 + 1] - self.cumulative[k2] <= 0.0 {
            k2 -= 1;
        }
        k2
    }

    pub fn point_at(&self, t: f64) -> Point {
        if self.points.len() < 2 {
            return self.points.first().copied().unwrap_or(Vec2::ZERO);
        }
        let k = self.segment(t);
        let seg_len = self.cumulative[k + 1] - self.cumulative[k];
        if seg_len <= 0.0 {
            return self.points[k];
        }
        let u = (t - self.cumulative[k]) / seg_len;
        self.points[k].lerp(self.points[k + 1], u)
    }

    /// Unit tangent at parameter `t`.
    pub fn tangent_at(&self, t: f64) -> Vec2 {
        if self.points.len() < 2 {
            return Vec2::X;
        }
        let k = self.segment(t);
        (self.points[k + 1] - self.points[k]).normalized().unwrap_or(Vec2::X)
    }
}
