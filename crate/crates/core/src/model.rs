//! Strokes, reference frames and analysis parameters, with the per-stroke measurements
//! the element fitter is built on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{bounding_box, polygon_signed_area, LineSeg, Point, Vec2};

/// Smallest resampling step, in pixels.
pub const MIN_RESAMPLE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[u8; 4]", into = "[u8; 4]")]
pub struct Rgba {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: u8,
}

impl Rgba {
    pub const BLACK: Rgba = Rgba::new(0, 0, 0, 255);

    pub const fn new(r: u8, g: u8, b: u8, a: u8) -> Self {
        Rgba { r, g, b, a }
    }
}

impl From<[u8; 4]> for Rgba {
    fn from([r, g, b, a]: [u8; 4]) -> Self {
        Rgba { r, g, b, a }
    }
}

impl From<Rgba> for [u8; 4] {
    fn from(c: Rgba) -> Self {
        [c.r, c.g, c.b, c.a]
    }
}

/// A user gesture: an ordered polyline plus its render attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stroke {
    pub vertices: Vec<Point>,
    pub width: f64,
    pub color: Rgba,
    pub opacity: f64,
    pub draw_index: u32,
}

impl Stroke {
    /// A black, fully opaque, 1 px stroke.
    pub fn new(vertices: Vec<Point>, draw_index: u32) -> Self {
        Stroke {
            vertices,
            width: 1.0,
            color: Rgba::BLACK,
            opacity: 1.0,
            draw_index,
        }
    }

    pub fn from_coords(coords: &[(f64, f64)], draw_index: u32) -> Self {
        Stroke::new(
            coords.iter().map(|&(x, y)| Vec2::new(x, y)).collect(),
            draw_index,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::InvalidGeometry(format!(
                "stroke {} has no vertices",
                self.draw_index
            )));
        }
        if self.vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "stroke {} has non-finite coordinates",
                self.draw_index
            )));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "stroke {} width must be positive",
                self.draw_index
            )));
        }
        if !(0.0..=1.0).contains(&self.opacity) {
            return Err(Error::InvalidGeometry(format!(
                "stroke {} opacity outside [0, 1]",
                self.draw_index
            )));
        }
        Ok(())
    }

    pub fn arc_length(&self) -> f64 {
        self.vertices.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// Same attributes, vertices mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(Point) -> Point) -> Stroke {
        Stroke {
            vertices: self.vertices.iter().map(|&p| f(p)).collect(),
            ..self.clone()
        }
    }

    fn shortest_segment(&self) -> Option<f64> {
        self.vertices
            .windows(2)
            .map(|w| w[0].distance(w[1]))
            .filter(|&d| d > 0.0)
            .min_by(f64::total_cmp)
    }
}

/// Checks that draw indices are unique across a stroke list.
pub fn check_unique_draw_indices(strokes: &[Stroke]) -> Result<()> {
    let mut seen: Vec<u32> = strokes.iter().map(|s| s.draw_index).collect();
    seen.sort_unstable();
    match seen.windows(2).find(|w| w[0] == w[1]) {
        Some(w) => Err(Error::DuplicateDrawIndex(w[0])),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternType {
    Hatching,
    Stippling,
}

/// Where reference elements live: along a main axis (1D) or in the plane (2D).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceFrame {
    OneD {
        origin: Point,
        direction: Vec2,
        length: f64,
    },
    /// `region` is the reference area drawn by the user; when absent the stroke bounding
    /// box stands in for it.
    TwoD {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<Vec<Point>>,
    },
}

impl ReferenceFrame {
    /// Main axis from `origin` towards `end`.
    pub fn one_d(origin: Point, end: Point) -> Result<Self> {
        let length = origin.distance(end);
        let direction = (end - origin)
            .normalized()
            .ok_or_else(|| Error::InvalidParameter("main axis has zero length".into()))?;
        Ok(ReferenceFrame::OneD {
            origin,
            direction,
            length,
        })
    }

    /// Main axis along the principal direction of the stroke vertices, spanning their
    /// projections.
    pub fn one_d_fitted(strokes: &[Stroke]) -> Result<Self> {
        let pts: Vec<Point> = strokes.iter().flat_map(|s| s.vertices.iter().copied()).collect();
        let (mean, mut dir) = crate::graph::principal_axis(&pts);
        if dir.x < 0.0 || (dir.x == 0.0 && dir.y < 0.0) {
            dir = -dir;
        }
        let (lo, hi) = pts
            .iter()
            .map(|&p| (p - mean).dot(dir))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
        if !(hi > lo) {
            return Err(Error::InvalidParameter("strokes do not span a main axis".into()));
        }
        ReferenceFrame::one_d(mean + dir * lo, mean + dir * hi)
    }

    pub fn two_d() -> Self {
        ReferenceFrame::TwoD { region: None }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ReferenceFrame::OneD {
                origin,
                direction,
                length,
            } => {
                if !origin.is_finite() || !(length.is_finite() && *length > 0.0) {
                    return Err(Error::InvalidParameter(
                        "main axis needs a finite origin and positive length".into(),
                    ));
                }
                if (direction.norm() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(
                        "main axis direction must be unit length".into(),
                    ));
                }
                Ok(())
            }
            ReferenceFrame::TwoD { region: Some(r) } if polygon_signed_area(r).abs() <= 0.0 => Err(
                Error::InvalidParameter("reference region has zero area".into()),
            ),
            ReferenceFrame::TwoD { .. } => Ok(()),
        }
    }

    /// Direction orientations are measured against.
    pub fn main_direction(&self) -> Vec2 {
        match self {
            ReferenceFrame::OneD { direction, .. } => *direction,
            ReferenceFrame::TwoD { .. } => Vec2::X,
        }
    }

    pub fn is_one_d(&self) -> bool {
        matches!(self, ReferenceFrame::OneD { .. })
    }

    /// Reference measure: main-axis length (1D) or reference area (2D).
    pub fn measure(&self, strokes: &[Stroke]) -> f64 {
        match self {
            ReferenceFrame::OneD { length, .. } => *length,
            ReferenceFrame::TwoD { region: Some(r) } => polygon_signed_area(r).abs(),
            ReferenceFrame::TwoD { region: None } => {
                let pts: Vec<Point> = strokes.iter().flat_map(|s| s.vertices.iter().copied()).collect();
                bounding_box(&pts)
                    .map(|(lo, hi)| (hi.x - lo.x) * (hi.y - lo.y))
                    .unwrap_or(0.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub pattern_type: PatternType,
    pub frame: ReferenceFrame,
    pub epsilon: f64,
}

impl AnalysisParams {
    pub fn new(pattern_type: PatternType, frame: ReferenceFrame, epsilon: f64) -> Self {
        AnalysisParams {
            pattern_type,
            frame,
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        self.frame.validate()
    }
}

/// Subdivides every segment into equal pieces no longer than `step`.
///
/// Original vertices are kept; zero-length segments are dropped.
pub fn resample_stroke(s: &Stroke, step: f64) -> Result<Stroke> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter("resample step must be positive".into()));
    }
    if s.vertices.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGeometry("non-finite stroke coordinates".into()));
    }
    let Some(&first) = s.vertices.first() else {
        return Err(Error::InvalidGeometry("stroke has no vertices".into()));
    };
    let mut out = vec![first];
    for w in s.vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = a.distance(b);
        if len == 0.0 {
            continue;
        }
        let pieces = (len / step).ceil().max(1.0) as usize;
        for k in 1..pieces {
            out.push(a.lerp(b, k as f64 / pieces as f64));
        }
        out.push(b);
    }
    Ok(Stroke {
        vertices: out,
        ..s.clone()
    })
}

/// Resampling step for centroid measurement: half of min(ε/10, shortest segment),
/// floored at [`MIN_RESAMPLE_STEP`].
pub fn centroid_resample_step(s: &Stroke, epsilon: f64) -> f64 {
    let base = match s.shortest_segment() {
        Some(shortest) => (epsilon / 10.0).min(shortest),
        None => epsilon / 10.0,
    };
    (base / 2.0).max(MIN_RESAMPLE_STEP)
}

/// Center of gravity of the vertices and the spread `2·max|p − c|`.
///
/// Expects an already resampled stroke.
pub fn centroid_and_spread(s: &Stroke) -> Result<(Point, f64)> {
    centroid_and_spread_of(&s.vertices)
}

pub(crate) fn centroid_and_spread_of(points: &[Point]) -> Result<(Point, f64)> {
    if points.is_empty() {
        return Err(Error::EmptySet);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidGeometry("non-finite coordinates".into()));
    }
    let c = points.iter().fold(Vec2::ZERO, |acc, &p| acc + p) / points.len() as f64;
    let r = points.iter().map(|&p| p.distance(c)).fold(0.0, f64::max);
    Ok((c, 2.0 * r))
}

/// Segment from the first to the last vertex of the gesture.
pub fn endpoint_virtual_line(s: &Stroke) -> Result<LineSeg> {
    let (Some(&p0), Some(&p1)) = (s.vertices.first(), s.vertices.last()) else {
        return Err(Error::InvalidGeometry("stroke has no vertices".into()));
    };
    if s.vertices.len() < 2 || p0 == p1 {
        return Err(Error::DegenerateLine);
    }
    Ok(LineSeg::new(p0, p1))
}
