//! Directed Hausdorff distances between point sets, segments and polylines.
//!
//! `d_H(X, Y) = max_{x ∈ X} min_{y ∈ Y} |x − y|`. The symmetric distance is the max of
//! both directions and is assembled at call sites.

use crate::error::{Error, Result};
use crate::geom::{LineSeg, Point};

/// The set distances are measured *to*.
#[derive(Debug, Clone, Copy)]
pub enum HausdorffTarget<'a> {
    Points(&'a [Point]),
    /// Exact point-to-segment distance, not vertex-sampled.
    Segment(LineSeg),
    /// Union of continuous polylines; a single-vertex polyline is a point.
    Polylines(&'a [&'a [Point]]),
}

impl HausdorffTarget<'_> {
    fn is_empty(&self) -> bool {
        match self {
            HausdorffTarget::Points(p) => p.is_empty(),
            HausdorffTarget::Segment(_) => false,
            HausdorffTarget::Polylines(ls) => ls.iter().all(|l| l.is_empty()),
        }
    }

    /// Distance from `x` to every convex piece of the target.
    fn piece_distances(&self, x: Point, out: &mut Vec<f64>) {
        out.clear();
        match self {
            HausdorffTarget::Points(ps) => out.extend(ps.iter().map(|p| p.distance(x))),
            HausdorffTarget::Segment(s) => out.push(s.distance_to(x)),
            HausdorffTarget::Polylines(ls) => {
                for l in ls.iter() {
                    match l.len() {
                        0 => {}
                        1 => out.push(l[0].distance(x)),
                        _ => out.extend(
                            l.windows(2)
                                .map(|w| LineSeg::new(w[0], w[1]).distance_to(x)),
                        ),
                    }
                }
            }
        }
    }

    fn distance(&self, x: Point) -> f64 {
        let mut buf = Vec::new();
        self.piece_distances(x, &mut buf);
        buf.into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Directed Hausdorff distance from a finite point set.
pub fn hausdorff_directed(x: &[Point], y: HausdorffTarget<'_>) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(x.iter().map(|&p| y.distance(p)).fold(0.0, f64::max))
}

/// Directed Hausdorff distance from every point of a continuous segment.
///
/// The distance to each convex target piece is convex along the segment, so on any
/// sub-interval `min_j max(g_j(a), g_j(b))` bounds the maximum from above; intervals are
/// split only where the nearest piece changes.
pub fn hausdorff_from_segment(seg: LineSeg, y: HausdorffTarget<'_>) -> Result<f64> {
    if y.is_empty() {
        return Err(Error::EmptySet);
    }
    let tol = 1e-10 * (1.0 + seg.length());
    let mut ga = Vec::new();
    let mut gb = Vec::new();
    y.piece_distances(seg.p0, &mut ga);
    y.piece_distances(seg.p1, &mut gb);
    let min_of = |g: &[f64]| g.iter().copied().fold(f64::INFINITY, f64::min);
    let mut best = min_of(&ga).max(min_of(&gb));

    let mut stack = vec![(0.0_f64, 1.0_f64, ga, gb, 0u32)];
    while let Some((a, b, ga, gb, depth)) = stack.pop() {
        let upper = ga
            .iter()
            .zip(&gb)
            .map(|(&u, &v)| u.max(v))
            .fold(f64::INFINITY, f64::min);
        if upper <= best + tol || depth >= 64 {
            continue;
        }
        let m = 0.5 * (a + b);
        let mut gm = Vec::new();
        y.piece_distances(seg.at(m), &mut gm);
        best = best.max(min_of(&gm));
        stack.push((a, m, ga, gm.clone(), depth + 1));
        stack.push((m, b, gm, gb, depth + 1));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::model::{resample_stroke, Stroke};

    fn dense_segment(seg: LineSeg, step: f64) -> Vec<Point> {
        let n = (seg.length() / step).ceil() as usize;
        (0..=n).map(|k| seg.at(k as f64 / n as f64)).collect()
    }

    #[test]
    fn identical_sets() {
        let x = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 2.0)];
        assert_eq!(hausdorff_directed(&x, HausdorffTarget::Points(&x)).unwrap(), 0.0);
    }

    #[test]
    fn single_points() {
        let d = hausdorff_directed(
            &[Vec2::new(0.0, 0.0)],
            HausdorffTarget::Points(&[Vec2::new(3.0, 4.0)]),
        )
        .unwrap();
        assert_eq!(d, 5.0);
    }

    #[test]
    fn resampled_tent_to_base() {
        let s = Stroke::from_coords(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.0)], 0);
        let r = resample_stroke(&s, 0.1).unwrap();
        let base = LineSeg::new(Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0));
        let d = hausdorff_directed(&r.vertices, HausdorffTarget::Segment(base)).unwrap();
        // Dense sampling of the segment as a point set.
        let dense = dense_segment(base, 1e-3);
        let oracle = hausdorff_directed(&r.vertices, HausdorffTarget::Points(&dense)).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        assert!((d - oracle).abs() < 1e-3);
    }

    #[test]
    fn empty_sets_rejected() {
        assert_eq!(
            hausdorff_directed(&[], HausdorffTarget::Points(&[Vec2::ZERO])),
            Err(Error::EmptySet)
        );
        assert_eq!(
            hausdorff_directed(&[Vec2::ZERO], HausdorffTarget::Points(&[])),
            Err(Error::EmptySet)
        );
    }

    #[test]
    fn segment_source_against_dense_oracle() {
        let seg = LineSeg::new(Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0));
        let arc: Vec<Point> = (0..=40)
            .map(|k| {
                let a = std::f64::consts::PI * k as f64 / 40.0;
                Vec2::new(2.0 - 2.0 * a.cos(), 1.3 * a.sin())
            })
            .collect();
        let lines = [arc.as_slice()];
        let exact = hausdorff_from_segment(seg, HausdorffTarget::Polylines(&lines)).unwrap();
        let dense = dense_segment(seg, 1e-4);
        let oracle = hausdorff_directed(&dense, HausdorffTarget::Polylines(&lines)).unwrap();
        assert!((exact - oracle).abs() < 1e-3, "{exact} vs {oracle}");
        assert!(exact >= oracle - 1e-12);
    }

    #[test]
    fn segment_source_flat_target_terminates() {
        let seg = LineSeg::new(Vec2::new(0.0, 0.0), Vec2::new(100.0, 0.0));
        let line = [Vec2::new(0.0, 0.0), Vec2::new(100.0, 0.0)];
        let lines = [&line[..]];
        assert_eq!(
            hausdorff_from_segment(seg, HausdorffTarget::Polylines(&lines)).unwrap(),
            0.0
        );
    }

    #[test]
    fn dashed_gap_seen_from_segment() {
        let seg = LineSeg::new(Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0));
        let a = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)];
        let b = [Vec2::new(1.2, 0.0), Vec2::new(2.0, 0.0)];
        let lines = [&a[..], &b[..]];
        let d = hausdorff_from_segment(seg, HausdorffTarget::Polylines(&lines)).unwrap();
        assert!((d - 0.1).abs() < 1e-9);
    }
}
