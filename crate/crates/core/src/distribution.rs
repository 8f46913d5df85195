//! Node layout with controlled nearest-neighbor spacing: random seeding, Lloyd relaxation
//! until the spacing ratio σ/μ drops below the reference ratio, then rescaling to the
//! reference mean spacing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{clip_half_plane, polygon_centroid, Point};
use crate::graph::delaunay_neighbors;
use crate::group::{PatternAnalysis, PropertyStats};
use crate::region::{PathParam, TargetRegion};
use crate::rng::{stream, LAYOUT_STREAM};
use rand::Rng;

pub const DEFAULT_MAX_ITERS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum Positions {
    /// Arc-length parameters along a path, sorted ascending.
    Path(Vec<f64>),
    Plane(Vec<Point>),
}

impl Positions {
    pub fn len(&self) -> usize {
        match self {
            Positions::Path(v) => v.len(),
            Positions::Plane(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub positions: Positions,
    pub rng_seed: u64,
    pub iterations_used: usize,
    /// σ/μ of nearest-neighbor distances after the last iteration.
    pub final_ratio: f64,
    /// False when `max_iters` was reached before the ratio dropped below the target.
    pub converged: bool,
    /// Number of nodes left outside the region by rescaling.
    #[serde(default)]
    pub outside_region: usize,
}

/// `N = round(n_ref · measure / measure_ref)`, clamped to at least 2. The flag reports the
/// clamp.
pub fn seed_count_checked(analysis: &PatternAnalysis, region: &TargetRegion) -> Result<(usize, bool)> {
    let measure = region.measure();
    if !(measure > 0.0 && analysis.measure_ref > 0.0) {
        return Err(Error::InvalidParameter(
            "reference and target measures must be positive".into(),
        ));
    }
    let raw = (analysis.n_ref as f64 * measure / analysis.measure_ref).round();
    Ok(if raw < 2.0 { (2, true) } else { (raw as usize, false) })
}

pub fn seed_count(analysis: &PatternAnalysis, region: &TargetRegion) -> Result<usize> {
    seed_count_checked(analysis, region).map(|(n, _)| n)
}

/// Nearest-neighbor distances: arc-length gaps on a path, euclidean in the plane.
pub fn nearest_neighbor_distances(positions: &Positions) -> Vec<f64> {
    match positions {
        Positions::Path(ts) => {
            let mut order: Vec<usize> = (0..ts.len()).collect();
            order.sort_by(|&a, &b| ts[a].total_cmp(&ts[b]));
            let mut out = vec![f64::INFINITY; ts.len()];
            for w in order.windows(2) {
                let gap = ts[w[1]] - ts[w[0]];
                out[w[0]] = out[w[0]].min(gap);
                out[w[1]] = out[w[1]].min(gap);
            }
            out
        }
        Positions::Plane(pts) => plane_nn_distances(pts, delaunay_neighbors(pts).as_deref()),
    }
}

fn plane_nn_distances(pts: &[Point], adj: Option<&[Vec<usize>]>) -> Vec<f64> {
    (0..pts.len())
        .map(|i| {
            let scan_all = adj.is_none_or(|a| a[i].is_empty());
            let candidates: Box<dyn Iterator<Item = usize>> = if scan_all {
                Box::new(0..pts.len())
            } else {
                Box::new(adj.unwrap()[i].iter().copied())
            };
            candidates
                .filter(|&j| j != i)
                .map(|j| pts[i].distance(pts[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

fn spacing_stats(d: &[f64]) -> PropertyStats {
    PropertyStats::from_samples(d).unwrap_or(PropertyStats::constant(0.0))
}

/// One Lloyd step on a path: each parameter moves to the midpoint of its Voronoi interval.
pub fn lloyd_step_path(ts: &[f64], length: f64) -> Vec<f64> {
    let mut sorted = ts.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    (0..n)
        .map(|k| {
            let lo = if k == 0 { 0.0 } else { 0.5 * (sorted[k - 1] + sorted[k]) };
            let hi = if k + 1 == n { length } else { 0.5 * (sorted[k] + sorted[k + 1]) };
            0.5 * (lo + hi)
        })
        .collect()
}

/// Voronoi cell of site `i` clipped to `polygon`.
pub fn voronoi_cell(i: usize, sites: &[Point], neighbors: Option<&[usize]>, polygon: &[Point]) -> Vec<Point> {
    let mut cell = polygon.to_vec();
    let mut clip = |j: usize| {
        let n = sites[j] - sites[i];
        if j != i && n.norm_squared() > 0.0 {
            cell = clip_half_plane(&cell, sites[i].lerp(sites[j], 0.5), n);
        }
    };
    match neighbors {
        Some(list) if !list.is_empty() => list.iter().for_each(|&j| clip(j)),
        _ => (0..sites.len()).for_each(clip),
    }
    cell
}

/// One Lloyd step in a polygon: each site moves to the centroid of its clipped cell.
/// Sites whose cell centroid would leave the polygon stay put.
pub fn lloyd_step_plane(sites: &[Point], polygon: &[Point], adj: Option<&[Vec<usize>]>) -> Vec<Point> {
    let region = TargetRegion::Polygon {
        points: polygon.to_vec(),
    };
    (0..sites.len())
        .map(|i| {
            let cell = voronoi_cell(i, sites, adj.map(|a| a[i].as_slice()), polygon);
            match polygon_centroid(&cell) {
                Some(c) if cell.len() >= 3 && region.contains(c) => c,
                _ => sites[i],
            }
        })
        .collect()
}

fn random_positions(n: usize, region: &TargetRegion, seed: u64) -> Positions {
    let mut rng = stream(seed, LAYOUT_STREAM);
    match region {
        TargetRegion::Path { .. } => {
            let len = region.measure();
            let mut ts: Vec<f64> = (0..n).map(|_| len * rng.random::<f64>()).collect();
            ts.sort_by(f64::total_cmp);
            Positions::Path(ts)
        }
        TargetRegion::Polygon { points } => {
            Positions::Plane((0..n).map(|_| region.sample_inside(points, &mut rng)).collect())
        }
    }
}

/// Lloyd relaxation from seeded uniform-random nodes, stopping once σ/μ < `r_star`.
pub fn lloyd_relax(
    n: usize,
    region: &TargetRegion,
    r_star: f64,
    seed: u64,
    max_iters: usize,
) -> Result<Distribution> {
    if n < 2 {
        return Err(Error::InsufficientPoints(n));
    }
    region.validate()?;
    let start = random_positions(n, region, seed);
    let mut d = lloyd_relax_from(start, region, r_star, max_iters)?;
    d.rng_seed = seed;
    Ok(d)
}

/// Lloyd relaxation from given positions. Zero iterations run if the start already
/// satisfies the ratio.
pub fn lloyd_relax_from(
    start: Positions,
    region: &TargetRegion,
    r_star: f64,
    max_iters: usize,
) -> Result<Distribution> {
    if start.len() < 2 {
        return Err(Error::InsufficientPoints(start.len()));
    }
    if !(r_star >= 0.0) || max_iters < 1 {
        return Err(Error::InvalidParameter(
            "r* must be non-negative and max_iters at least 1".into(),
        ));
    }
    let mut iterations = 0;
    let (positions, ratio) = match (start, region) {
        (Positions::Path(mut ts), TargetRegion::Path { .. }) => {
            let len = region.measure();
            let mut ratio = spacing_stats(&nearest_neighbor_distances(&Positions::Path(ts.clone()))).ratio();
            while !(ratio < r_star) && iterations < max_iters {
                ts = lloyd_step_path(&ts, len);
                iterations += 1;
                ratio = spacing_stats(&nearest_neighbor_distances(&Positions::Path(ts.clone()))).ratio();
            }
            (Positions::Path(ts), ratio)
        }
        (Positions::Plane(mut pts), TargetRegion::Polygon { points: poly }) => {
            let mut adj = delaunay_neighbors(&pts);
            let mut ratio = spacing_stats(&plane_nn_distances(&pts, adj.as_deref())).ratio();
            while !(ratio < r_star) && iterations < max_iters {
                pts = lloyd_step_plane(&pts, poly, adj.as_deref());
                iterations += 1;
                adj = delaunay_neighbors(&pts);
                ratio = spacing_stats(&plane_nn_distances(&pts, adj.as_deref())).ratio();
            }
            (Positions::Plane(pts), ratio)
        }
        _ => {
            return Err(Error::InvalidParameter(
                "positions do not match the region kind".into(),
            ))
        }
    };
    Ok(Distribution {
        positions,
        rng_seed: 0,
        iterations_used: iterations,
        final_ratio: ratio,
        converged: ratio < r_star,
        outside_region: 0,
    })
}

/// Scales all positions by μ*/μ about the region centroid (2D) or the path-parameter
/// midpoint (1D). Nodes may leave the region; they are counted, not clipped.
pub fn rescale_to_mean(d: &Distribution, mu_star: f64, region: &TargetRegion) -> Result<Distribution> {
    let mu = spacing_stats(&nearest_neighbor_distances(&d.positions)).mean;
    if !(mu > 0.0) {
        return Err(Error::DegenerateDistribution);
    }
    let k = mu_star / mu;
    let (positions, outside) = match &d.positions {
        Positions::Path(ts) => {
            let len = region.measure();
            let mid = 0.5 * len;
            let scaled: Vec<f64> = ts.iter().map(|&t| mid + k * (t - mid)).collect();
            let outside = scaled.iter().filter(|&&t| t < 0.0 || t > len).count();
            (Positions::Path(scaled), outside)
        }
        Positions::Plane(pts) => {
            let c = region.centroid();
            let scaled: Vec<Point> = pts.iter().map(|&p| c + (p - c) * k).collect();
            let outside = scaled.iter().filter(|&&p| !region.contains(p)).count();
            (Positions::Plane(scaled), outside)
        }
    };
    Ok(Distribution {
        positions,
        outside_region: outside,
        ..d.clone()
    })
}

/// Embeds the distribution in the plane, returning node positions and, on paths, the
/// unit tangent at each node.
pub fn embed(d: &Distribution, region: &TargetRegion) -> Vec<(Point, Option<crate::geom::Vec2>)> {
    match (&d.positions, region) {
        (Positions::Path(ts), TargetRegion::Path { points }) => {
            let pp = PathParam::new(points);
            ts.iter()
                .map(|&t| (pp.point_at(t), Some(pp.tangent_at(t))))
                .collect()
        }
        (Positions::Plane(pts), _) => pts.iter().map(|&p| (p, None)).collect(),
        (Positions::Path(ts), TargetRegion::Polygon { .. }) => {
            ts.iter().map(|&t| (Point::new(t, 0.0), None)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;

    fn unit_path() -> TargetRegion {
        TargetRegion::path(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn one_d_step_matches_hand_voronoi() {
        let out = lloyd_step_path(&[0.1, 0.2, 0.9], 1.0);
        let expect = [0.075, 0.35, 0.775];
        for (a, b) in out.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn cell_centered_points_are_fixed() {
        let start = Positions::Path(vec![0.125, 0.375, 0.625, 0.875]);
        let d = lloyd_relax_from(start.clone(), &unit_path(), 0.01, 10).unwrap();
        assert_eq!(d.iterations_used, 0);
        assert_eq!(d.final_ratio, 0.0);
        assert_eq!(d.positions, start);
        assert_eq!(lloyd_step_path(&[0.125, 0.375, 0.625, 0.875], 1.0), vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn rescale_doubles_path_mean() {
        let d = Distribution {
            positions: Positions::Path(vec![0.075, 0.35, 0.775]),
            rng_seed: 0,
            iterations_used: 1,
            final_ratio: 0.0,
            converged: true,
            outside_region: 0,
        };
        let mu = spacing_stats(&nearest_neighbor_distances(&d.positions)).mean;
        let r = rescale_to_mean(&d, 2.0 * mu, &unit_path()).unwrap();
        let mu2 = spacing_stats(&nearest_neighbor_distances(&r.positions)).mean;
        assert!((mu2 - 2.0 * mu).abs() < 1e-12);
        let same = rescale_to_mean(&d, mu, &unit_path()).unwrap();
        let Positions::Path(ts) = same.positions else { panic!() };
        for (a, b) in ts.iter().zip([0.075, 0.35, 0.775]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rescale_halves_plane_offsets() {
        let region = TargetRegion::rect(-50.0, -50.0, 50.0, 50.0).unwrap();
        let d = Distribution {
            positions: Positions::Plane(vec![Vec2::new(-10.0, 0.0), Vec2::new(0.0, 0.0), Vec2::new(10.0, 0.0), Vec2::new(0.0, 10.0)]),
            rng_seed: 0,
            iterations_used: 0,
            final_ratio: 0.0,
            converged: true,
            outside_region: 0,
        };
        let r = rescale_to_mean(&d, 5.0, &region).unwrap();
        let Positions::Plane(p) = r.positions else { panic!() };
        assert_eq!(p[0], Vec2::new(-5.0, 0.0));
        assert_eq!(p[3], Vec2::new(0.0, 5.0));
    }

    #[test]
    fn coincident_points_cannot_rescale() {
        let d = Distribution {
            positions: Positions::Path(vec![0.5, 0.5]),
            rng_seed: 0,
            iterations_used: 0,
            final_ratio: 0.0,
            converged: true,
            outside_region: 0,
        };
        assert_eq!(rescale_to_mean(&d, 1.0, &unit_path()), Err(Error::DegenerateDistribution));
    }

    #[test]
    fn too_few_points() {
        assert_eq!(lloyd_relax(1, &unit_path(), 0.1, 0, 10), Err(Error::InsufficientPoints(1)));
    }

    #[test]
    fn unit_square_reaches_target_ratio() {
        let region = TargetRegion::rect(0.0, 0.0, 1.0, 1.0).unwrap();
        let d = lloyd_relax(200, &region, 0.15, 7, 200).unwrap();
        assert!(d.converged, "ratio {}", d.final_ratio);
        assert!(d.final_ratio <= 0.15);
        let Positions::Plane(p) = &d.positions else { panic!() };
        assert!(p.iter().all(|&q| region.contains(q)));
    }

    #[test]
    fn same_seed_same_layout() {
        let region = TargetRegion::rect(0.0, 0.0, 10.0, 5.0).unwrap();
        let a = lloyd_relax(50, &region, 0.1, 99, 50).unwrap();
        let b = lloyd_relax(50, &region, 0.1, 99, 50).unwrap();
        assert_eq!(a, b);
    }
}
