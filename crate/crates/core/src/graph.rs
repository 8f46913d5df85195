//! Nearest-neighbor graphs over element centers: a chain for 1D layouts and a filtered
//! Delaunay triangulation in 2D.

use serde::{Deserialize, Serialize};

use crate::geom::{tolerance, Point, Vec2};

/// Nearest-neighbor structure over a list of centers, indexed by position in that list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnGraph {
    /// Nearest neighbor of each node (ties broken by lower index).
    pub nearest: Vec<usize>,
    /// Kept edges `(a, b)` with `a < b`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Set when a 2D input was collinear and a chain along the principal axis was used.
    pub degenerate_fallback: bool,
}

/// Delaunay adjacency, or `None` when the points admit no triangulation (collinear or
/// fewer than three distinct points). Points dropped as duplicates get empty lists.
pub fn delaunay_neighbors(points: &[Point]) -> Option<Vec<Vec<usize>>> {
    if points.len() < 3 {
        return None;
    }
    let pts: Vec<delaunator::Point> = points
        .iter()
        .map(|p| delaunator::Point { x: p.x, y: p.y })
        .collect();
    let tri = delaunator::triangulate(&pts);
    if tri.triangles.is_empty() {
        return None;
    }
    let mut adj = vec![Vec::new(); points.len()];
    for t in tri.triangles.chunks_exact(3) {
        for k in 0..3 {
            let (u, v) = (t[k], t[(k + 1) % 3]);
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    Some(adj)
}

fn nearest_among(i: usize, candidates: impl Iterator<Item = usize>, centers: &[Point]) -> Option<(usize, f64)> {
    candidates
        .filter(|&j| j != i)
        .map(|j| (j, centers[i].distance(centers[j])))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
}

/// Keeps candidate edges that connect a node to one of its (tied) nearest neighbors.
fn filter_edges(candidates: &[(usize, usize)], centers: &[Point], nn_dist: &[f64]) -> Vec<(usize, usize)> {
    let tol = tolerance();
    let mut edges: Vec<(usize, usize)> = candidates
        .iter()
        .map(|&(a, b)| (a.min(b), a.max(b)))
        .filter(|&(a, b)| {
            let d = centers[a].distance(centers[b]);
            d <= nn_dist[a] + tol || d <= nn_dist[b] + tol
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Chain graph: consecutive nodes in `order` are the candidates.
pub fn chain_graph(order: &[usize], centers: &[Point]) -> NnGraph {
    let n = centers.len();
    let mut nearest = vec![0; n];
    let mut nn_dist = vec![f64::INFINITY; n];
    for (k, &i) in order.iter().enumerate() {
        let prev = k.checked_sub(1).map(|p| order[p]);
        let next = order.get(k + 1).copied();
        if let Some((j, d)) = nearest_among(i, prev.into_iter().chain(next), centers) {
            nearest[i] = j;
            nn_dist[i] = d;
        }
    }
    let candidates: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
    NnGraph {
        nearest,
        edges: filter_edges(&candidates, centers, &nn_dist),
        degenerate_fallback: false,
    }
}

/// Order of nodes by projection onto `direction` (ties by index).
pub fn order_along(centers: &[Point], origin: Point, direction: Vec2) -> Vec<usize> {
    let mut order: Vec<usize> = (0..centers.len()).collect();
    order.sort_by(|&a, &b| {
        let ta = (centers[a] - origin).dot(direction);
        let tb = (centers[b] - origin).dot(direction);
        ta.total_cmp(&tb).then(a.cmp(&b))
    });
    order
}

/// Principal direction of a point cloud (major eigenvector of the covariance).
pub fn principal_axis(points: &[Point]) -> (Point, Vec2) {
    let n = points.len().max(1) as f64;
    let mean = points.iter().fold(Vec2::ZERO, |s, &p| s + p) / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &p in points {
        let d = p - mean;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    (mean, Vec2::from_angle(0.5 * (2.0 * sxy).atan2(sxx - syy)))
}

/// Delaunay edges filtered to nearest-neighbor edges. Collinear input falls back to a
/// chain along the principal axis.
pub fn planar_graph(centers: &[Point]) -> NnGraph {
    let n = centers.len();
    let Some(mut adj) = delaunay_neighbors(centers) else {
        let (mean, dir) = principal_axis(centers);
        let mut g = chain_graph(&order_along(centers, mean, dir), centers);
        g.degenerate_fallback = n >= 3;
        return g;
    };
    // Duplicates are absent from the triangulation; link them to their nearest node.
    for i in 0..n {
        if adj[i].is_empty() {
            if let Some((j, _)) = nearest_among(i, 0..n, centers) {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mut nearest = vec![0; n];
    let mut nn_dist = vec![f64::INFINITY; n];
    let mut candidates = Vec::new();
    for i in 0..n {
        candidates.extend(adj[i].iter().map(|&j| (i, j)));
        if let Some((j, d)) = nearest_among(i, adj[i].iter().copied(), centers) {
            nearest[i] = j;
            nn_dist[i] = d;
        }
    }
    NnGraph {
        nearest,
        edges: filter_edges(&candidates, centers, &nn_dist),
        degenerate_fallback: false,
    }
}

/// Distance from every node to its nearest neighbor.
pub fn nearest_distances(centers: &[Point], graph: &NnGraph) -> Vec<f64> {
    graph
        .nearest
        .iter()
        .enumerate()
        .map(|(i, &j)| centers[i].distance(centers[j]))
        .collect()
}
