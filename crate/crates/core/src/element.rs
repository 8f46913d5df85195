//! Fitting strokes to point and line elements at scale ε, greedy clustering in drawing
//! order, and per-element properties.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{signed_line_angle, LineSeg, Point, Vec2};
use crate::hausdorff::{hausdorff_directed, hausdorff_from_segment, HausdorffTarget};
use crate::model::{
    centroid_and_spread_of, centroid_resample_step, check_unique_draw_indices,
    endpoint_virtual_line, resample_stroke, AnalysisParams, PatternType, ReferenceFrame, Stroke,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ElementKind {
    Point { center: Point, size: f64 },
    Line { axis: LineSeg, length: f64, width: f64 },
}

/// A cluster of strokes perceived as one point or line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    /// Member gestures; together they are the element's shape.
    pub strokes: Vec<Stroke>,
    pub valid: bool,
    pub min_draw_index: u32,
}

impl Element {
    pub fn center(&self) -> Point {
        match self.kind {
            ElementKind::Point { center, .. } => center,
            ElementKind::Line { axis, .. } => axis.midpoint(),
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self.kind, ElementKind::Line { .. })
    }

    pub fn axis(&self) -> Option<LineSeg> {
        match self.kind {
            ElementKind::Line { axis, .. } => Some(axis),
            ElementKind::Point { .. } => None,
        }
    }

    /// Point size or line width: the quantity bounded by ε.
    pub fn spread(&self) -> f64 {
        match self.kind {
            ElementKind::Point { size, .. } => size,
            ElementKind::Line { width, .. } => width,
        }
    }

    pub fn pattern_type(&self) -> PatternType {
        match self.kind {
            ElementKind::Point { .. } => PatternType::Stippling,
            ElementKind::Line { .. } => PatternType::Hatching,
        }
    }
}

fn point_samples<'a>(strokes: impl IntoIterator<Item = &'a Stroke>, eps: f64) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for s in strokes {
        let r = resample_stroke(s, centroid_resample_step(s, eps))?;
        out.extend(r.vertices);
    }
    Ok(out)
}

/// Line spread `2·max(d_H(S, l), d_H(l, S))` with `S` the union of continuous strokes.
fn line_spread(strokes: &[&Stroke], axis: LineSeg) -> Result<f64> {
    let vertices: Vec<Point> = strokes.iter().flat_map(|s| s.vertices.iter().copied()).collect();
    let to_axis = hausdorff_directed(&vertices, HausdorffTarget::Segment(axis))?;
    let polylines: Vec<&[Point]> = strokes.iter().map(|s| s.vertices.as_slice()).collect();
    let from_axis = hausdorff_from_segment(axis, HausdorffTarget::Polylines(&polylines))?;
    Ok(2.0 * to_axis.max(from_axis))
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("epsilon must be positive".into()))
    }
}

/// Fits a stroke to a point: center of gravity and spread; valid iff spread ≤ ε.
pub fn fit_point(s: &Stroke, eps: f64) -> Result<Element> {
    check_eps(eps)?;
    let samples = point_samples([s], eps)?;
    let (center, size) = centroid_and_spread_of(&samples)?;
    Ok(Element {
        kind: ElementKind::Point { center, size },
        strokes: vec![s.clone()],
        valid: size <= eps,
        min_draw_index: s.draw_index,
    })
}

/// Fits a stroke to its endpoint line; valid iff the line spread is ≤ ε.
///
/// Coincident endpoints yield an invalid element with a zero-length axis.
pub fn fit_line(s: &Stroke, eps: f64) -> Result<Element> {
    check_eps(eps)?;
    s.validate()?;
    let (axis, valid, width) = match endpoint_virtual_line(s) {
        Ok(axis) => {
            let width = line_spread(&[s], axis)?;
            (axis, width <= eps, width)
        }
        Err(Error::DegenerateLine) => {
            let p = s.vertices[0];
            let (_, spread) = centroid_and_spread_of(&s.vertices)?;
            (LineSeg::new(p, p), false, spread)
        }
        Err(e) => return Err(e),
    };
    Ok(Element {
        kind: ElementKind::Line {
            axis,
            length: axis.length(),
            width,
        },
        strokes: vec![s.clone()],
        valid,
        min_draw_index: s.draw_index,
    })
}

/// Total-least-squares line through the four axis endpoints, clipped to their projections.
fn fit_merged_axis(a: LineSeg, b: LineSeg) -> Option<LineSeg> {
    let pts = [a.p0, a.p1, b.p0, b.p1];
    let mean = pts.iter().fold(Vec2::ZERO, |s, &p| s + p) / 4.0;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in pts {
        let d = p - mean;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    let mut dir = Vec2::from_angle(0.5 * (2.0 * sxy).atan2(sxx - syy));
    if let Some(da) = a.direction() {
        if dir.dot(da) < 0.0 {
            dir = -dir;
        }
    }
    let (lo, hi) = pts
        .iter()
        .map(|&p| (p - mean).dot(dir))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| (lo.min(t), hi.max(t)));
    (hi > lo).then(|| LineSeg::new(mean + dir * lo, mean + dir * hi))
}

/// Lower bounds on the merged spread that avoid the full measurement.
///
/// Points: the merged diameter is at least the distance between the two centroids.
/// Lines: members lie within ε/2 of their axes, and a mergeable pair has member strokes
/// within ε of each other, so axes further than 2ε apart can never merge.
fn merge_impossible(a: &Element, b: &Element, eps: f64) -> bool {
    match (a.kind, b.kind) {
        (ElementKind::Point { center: ca, .. }, ElementKind::Point { center: cb, .. }) => {
            ca.distance(cb) > eps
        }
        (ElementKind::Line { axis: la, .. }, ElementKind::Line { axis: lb, .. }) => {
            la.distance_to_segment(&lb) > 2.0 * eps
        }
        _ => false,
    }
}

/// Attempts to cluster two valid elements of the same kind at scale ε.
pub fn try_merge(a: &Element, b: &Element, eps: f64) -> Result<Option<Element>> {
    check_eps(eps)?;
    if a.is_line() != b.is_line() {
        return Err(Error::KindMismatch);
    }
    if !a.valid || !b.valid {
        return Err(Error::InvalidParameter("only valid elements can be merged".into()));
    }
    if merge_impossible(a, b, eps) {
        return Ok(None);
    }
    let strokes: Vec<Stroke> = a.strokes.iter().chain(&b.strokes).cloned().collect();
    let min_draw_index = a.min_draw_index.min(b.min_draw_index);
    let kind = match (a.kind, b.kind) {
        (ElementKind::Point { .. }, ElementKind::Point { .. }) => {
            let samples = point_samples(&strokes, eps)?;
            let (center, size) = centroid_and_spread_of(&samples)?;
            if size > eps {
                return Ok(None);
            }
            ElementKind::Point { center, size }
        }
        (ElementKind::Line { axis: la, .. }, ElementKind::Line { axis: lb, .. }) => {
            let Some(axis) = fit_merged_axis(la, lb) else {
                return Ok(None);
            };
            let members: Vec<&Stroke> = strokes.iter().collect();
            let width = line_spread(&members, axis)?;
            if width > eps {
                return Ok(None);
            }
            ElementKind::Line {
                axis,
                length: axis.length(),
                width,
            }
        }
        _ => unreachable!("kinds checked above"),
    };
    Ok(Some(Element {
        kind,
        strokes,
        valid: true,
        min_draw_index,
    }))
}

/// Fits every stroke per the pattern type, then greedily merges valid elements.
///
/// Pairs are scanned in ascending `(min_draw_index_a, min_draw_index_b)` order; the first
/// mergeable pair is merged and the scan restarts. Invalid elements are kept but never
/// merged. Output is ordered by `min_draw_index`.
pub fn cluster_elements(strokes: &[Stroke], params: &AnalysisParams) -> Result<Vec<Element>> {
    params.validate()?;
    check_unique_draw_indices(strokes)?;
    let eps = params.epsilon;
    let mut ordered: Vec<&Stroke> = strokes.iter().collect();
    ordered.sort_by_key(|s| s.draw_index);

    // (uid, element); uids change whenever an element changes, so failed pairs stay failed.
    let mut elements: Vec<(u64, Element)> = Vec::with_capacity(ordered.len());
    for (uid, s) in ordered.into_iter().enumerate() {
        s.validate()?;
        let e = match params.pattern_type {
            PatternType::Stippling => fit_point(s, eps)?,
            PatternType::Hatching => fit_line(s, eps)?,
        };
        elements.push((uid as u64, e));
    }
    let mut next_uid = elements.len() as u64;
    let mut failed: HashSet<(u64, u64)> = HashSet::new();

    'scan: loop {
        for i in 0..elements.len() {
            if !elements[i].1.valid {
                continue;
            }
            for j in (i + 1)..elements.len() {
                if !elements[j].1.valid {
                    continue;
                }
                let key = (elements[i].0, elements[j].0);
                if failed.contains(&key) {
                    continue;
                }
                match try_merge(&elements[i].1, &elements[j].1, eps)? {
                    Some(merged) => {
                        elements[i] = (next_uid, merged);
                        next_uid += 1;
                        elements.remove(j);
                        continue 'scan;
                    }
                    None => {
                        failed.insert(key);
                    }
                }
            }
        }
        break;
    }
    Ok(elements.into_iter().map(|(_, e)| e).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Extent {
    Point { size: f64 },
    Line { length: f64, width: f64 },
}

/// Measured element properties; orientation is absent for points and the perpendicular
/// offset is absent for 2D frames.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementProperties {
    pub extent: Extent,
    pub orientation: Option<f64>,
    pub perp_offset: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementProperty {
    Size,
    Length,
    Width,
    Orientation,
    PerpOffset,
}

impl ElementProperty {
    pub const ALL: [ElementProperty; 5] = [
        ElementProperty::Size,
        ElementProperty::Length,
        ElementProperty::Width,
        ElementProperty::Orientation,
        ElementProperty::PerpOffset,
    ];
}

impl ElementProperties {
    pub fn get(&self, p: ElementProperty) -> Option<f64> {
        match (p, self.extent) {
            (ElementProperty::Size, Extent::Point { size }) => Some(size),
            (ElementProperty::Length, Extent::Line { length, .. }) => Some(length),
            (ElementProperty::Width, Extent::Line { width, .. }) => Some(width),
            (ElementProperty::Orientation, _) => self.orientation,
            (ElementProperty::PerpOffset, _) => self.perp_offset,
            _ => None,
        }
    }

    /// Overwrites a property that the element carries; others are left alone.
    pub fn set(&mut self, p: ElementProperty, v: f64) {
        match (p, &mut self.extent) {
            (ElementProperty::Size, Extent::Point { size }) => *size = v,
            (ElementProperty::Length, Extent::Line { length, .. }) => *length = v,
            (ElementProperty::Width, Extent::Line { width, .. }) => *width = v,
            (ElementProperty::Orientation, _) if self.orientation.is_some() => {
                self.orientation = Some(v)
            }
            (ElementProperty::PerpOffset, _) if self.perp_offset.is_some() => {
                self.perp_offset = Some(v)
            }
            _ => {}
        }
    }

    /// Properties present on this element, in [`ElementProperty::ALL`] order.
    pub fn present(&self) -> impl Iterator<Item = (ElementProperty, f64)> + '_ {
        ElementProperty::ALL
            .into_iter()
            .filter_map(|p| self.get(p).map(|v| (p, v)))
    }
}

pub fn element_properties(e: &Element, frame: &ReferenceFrame) -> ElementProperties {
    let (extent, orientation) = match e.kind {
        ElementKind::Point { size, .. } => (Extent::Point { size }, None),
        ElementKind::Line { axis, length, width } => {
            let dir = axis.direction().unwrap_or(Vec2::X);
            (
                Extent::Line { length, width },
                Some(signed_line_angle(frame.main_direction(), dir)),
            )
        }
    };
    let perp_offset = match frame {
        ReferenceFrame::OneD {
            origin, direction, ..
        } => Some(direction.cross(e.center() - *origin)),
        ReferenceFrame::TwoD { .. } => None,
    };
    ElementProperties {
        extent,
        orientation,
        perp_offset,
    }
}
