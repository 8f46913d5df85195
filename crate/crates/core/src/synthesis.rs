//! Pattern synthesis: lay out nodes with the reference spacing, instantiate a reference
//! element at each node, then correct nearest-neighbor pairs toward reference pair
//! measures.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::behavior::{
    assign_element_properties, pair_targets, shape_from_similar_pair, Behavior,
};
use crate::distribution::{
    embed, lloyd_relax, rescale_to_mean, seed_count_checked, DEFAULT_MAX_ITERS,
};
use crate::element::{Element, ElementKind, ElementProperties, Extent};
use crate::error::{Error, Result};
use crate::geom::{normalize_line_angle, Point, Vec2};
use crate::graph::{chain_graph, planar_graph, NnGraph};
use crate::group::{LinePairGeometry, LineShape, PairProperties, PatternAnalysis};
use crate::model::{ReferenceFrame, Stroke};
use crate::region::TargetRegion;
use crate::rng::{node_stream, stream, CORRECTION_STREAM};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisRequest {
    pub region: TargetRegion,
    pub behavior: Behavior,
    /// Correction amount in [0, 1].
    pub alpha: f64,
    pub seed: u64,
    #[serde(default)]
    pub overrides: SynthesisOverrides,
}

impl SynthesisRequest {
    pub fn new(region: TargetRegion, behavior: Behavior, alpha: f64, seed: u64) -> Self {
        SynthesisRequest {
            region,
            behavior,
            alpha,
            seed,
            overrides: SynthesisOverrides::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter("alpha must lie in [0, 1]".into()));
        }
        if let Some(r) = self.overrides.r_star {
            if !(r >= 0.0) {
                return Err(Error::InvalidParameter("r* must be non-negative".into()));
            }
        }
        if self.overrides.max_iters == Some(0) {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        self.region.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedElement {
    pub node_id: usize,
    pub source_element_id: usize,
    pub center: Point,
    /// Angle of the element's local x-axis in the plane.
    pub orientation: f64,
    /// Scale along and across the local x-axis.
    pub scale: (f64, f64),
    /// Extent actually realized after clamping.
    pub extent: Extent,
    /// Properties chosen by the behavior, before clamping.
    pub assigned: ElementProperties,
    pub strokes: Vec<Stroke>,
    pub frozen: bool,
}

impl PlacedElement {
    pub fn line_shape(&self) -> Option<LineShape> {
        match self.extent {
            Extent::Line { length, .. } => Some(LineShape {
                center: self.center,
                direction: Vec2::from_angle(self.orientation),
                length,
            }),
            Extent::Point { .. } => None,
        }
    }

    /// Rigid motion: rotation by `angle` about the current center, then translation.
    pub fn transform(&mut self, angle: f64, translation: Vec2) {
        let c = self.center;
        let new_center = c + translation;
        for s in &mut self.strokes {
            for v in &mut s.vertices {
                *v = new_center + (*v - c).rotated(angle);
            }
        }
        self.center = new_center;
        self.orientation += angle;
    }
}

/// Measures the pair from `fixed` to `moving`.
pub fn measure_placed_pair(fixed: &PlacedElement, moving: &PlacedElement) -> Result<PairProperties> {
    match (fixed.line_shape(), moving.line_shape()) {
        (Some(a), Some(b)) => PairProperties::of_lines(&a, &b),
        (None, None) => Ok(PairProperties {
            prox: fixed.center.distance(moving.center),
            par: None,
            ov: None,
            sep: None,
        }),
        _ => Err(Error::KindMismatch),
    }
}

/// Placement of a reference element: local frame, scale clamps, rotation, translation.
pub fn instantiate(
    node_id: usize,
    position: Point,
    tangent: Option<Vec2>,
    props: &ElementProperties,
    source_id: usize,
    source: &Element,
    frame: &ReferenceFrame,
    eps: f64,
) -> PlacedElement {
    let main = frame.main_direction();
    let origin = source.center();
    // Local x-axis: the axis direction folded to within ±90° of the main direction.
    let local_x = match source.kind {
        ElementKind::Line { axis, .. } => {
            let d = axis.direction().unwrap_or(main);
            if main.dot(d) < 0.0 || (main.dot(d) == 0.0 && main.cross(d) < 0.0) {
                -d
            } else {
                d
            }
        }
        ElementKind::Point { .. } => main,
    };
    let local_y = local_x.perp();

    let (scale, extent) = match (source.kind, props.extent) {
        (ElementKind::Line { length, width, .. }, Extent::Line { length: l, width: w }) => {
            let sx = if length > 0.0 { l / length } else { 1.0 };
            let sy = if width > 0.0 { w.min(eps) / width } else { 1.0 };
            (
                (sx, sy),
                Extent::Line {
                    length: length * sx,
                    width: width * sy,
                },
            )
        }
        (ElementKind::Point { size, .. }, Extent::Point { size: s }) => {
            let k = if size > 0.0 { s.min(eps) / size } else { 1.0 };
            ((k, k), Extent::Point { size: size * k })
        }
        // Mismatched kinds keep the reference geometry.
        (ElementKind::Line { length, width, .. }, _) => ((1.0, 1.0), Extent::Line { length, width }),
        (ElementKind::Point { size, .. }, _) => ((1.0, 1.0), Extent::Point { size }),
    };

    // 2D orientations are relative to the X axis, 1D ones to the path tangent.
    let base_dir = tangent.unwrap_or(Vec2::X);
    let orientation = base_dir.angle() + props.orientation.unwrap_or(0.0);
    let center = match (tangent, props.perp_offset) {
        (Some(_), Some(off)) => position + base_dir.perp() * off,
        _ => position,
    };
    let ex = Vec2::from_angle(orientation);
    let ey = ex.perp();
    let strokes = source
        .strokes
        .iter()
        .map(|s| {
            s.map_vertices(|p| {
                let d = p - origin;
                let (lx, ly) = (d.dot(local_x) * scale.0, d.dot(local_y) * scale.1);
                center + ex * lx + ey * ly
            })
        })
        .collect();
    PlacedElement {
        node_id,
        source_element_id: source_id,
        center,
        orientation,
        scale,
        extent,
        assigned: *props,
        strokes,
        frozen: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionTransform {
    pub rotation: f64,
    pub translation: Vec2,
}

/// Full (α = 1) correction moving `moving` so the pair matches `target`.
///
/// Points move along the center difference to reach the target proximity. Lines rotate
/// to the target parallelism, then translate along and across the post-rotation bisector
/// for overlapping and separation. Returns `None` when the centers coincide for points.
pub fn correction_transform(
    fixed: &PlacedElement,
    moving: &PlacedElement,
    target: &PairProperties,
) -> Result<Option<CorrectionTransform>> {
    match (fixed.line_shape(), moving.line_shape()) {
        (None, None) => {
            let lambda = moving.center - fixed.center;
            let Some(dir) = lambda.normalized() else {
                return Ok(None);
            };
            Ok(Some(CorrectionTransform {
                rotation: 0.0,
                translation: dir * (target.prox - lambda.norm()),
            }))
        }
        (Some(a), Some(b)) => {
            let before = LinePairGeometry::measure(&a, &b);
            let par2 = target.par.unwrap_or(before.par()).clamp(0.0, 1.0);
            let sign = if before.theta >= 0.0 { 1.0 } else { -1.0 };
            let rotation = sign * (par2 - before.par()) * FRAC_PI_2;

            let rotated = LineShape {
                direction: b.direction.rotated(rotation),
                ..b
            };
            let g = LinePairGeometry::measure(&a, &rotated);
            let l_sum = g.projected_length_sum();
            let ov1 = g.ov()?;
            let ov2 = target.ov.unwrap_or(ov1).max(0.0);
            let along = g.delta.normalized().unwrap_or(g.bisector);
            let delta = along * ((ov2 - ov1) * l_sum / 2.0);
            // Δ and Γ are measured from `fixed` to `moving`, so Γ points away from `fixed`.
            let sep1 = g.sep();
            let sep2 = target.sep.unwrap_or(sep1).max(0.0);
            let away = g.gamma.normalized().unwrap_or(g.normal);
            let gamma = away * (sep2 - sep1);
            Ok(Some(CorrectionTransform {
                rotation,
                translation: delta + gamma,
            }))
        }
        _ => Err(Error::KindMismatch),
    }
}

/// Applies `alpha` times the full correction to `moving`.
pub fn correct_pair(
    fixed: &PlacedElement,
    moving: &mut PlacedElement,
    target: &PairProperties,
    alpha: f64,
) -> Result<Option<CorrectionTransform>> {
    let Some(t) = correction_transform(fixed, moving, target)? else {
        return Ok(None);
    };
    moving.transform(alpha * t.rotation, t.translation * alpha);
    Ok(Some(t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SynthesisWarning {
    SeedCountClamped { requested: f64 },
    LloydNotConverged { iterations: usize, ratio: f64 },
    NodesOutsideRegion { count: usize },
    SamplingCapped { draws: usize },
    CoincidentPairSkipped { a: usize, b: usize },
    DegenerateGraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionRecord {
    pub fixed: usize,
    pub moved: usize,
    pub before: PairProperties,
    pub target: PairProperties,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub analysis_id: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutSummary {
    pub nodes: usize,
    pub iterations_used: usize,
    pub final_ratio: f64,
    pub r_star: f64,
    pub outside_region: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedPattern {
    pub elements: Vec<PlacedElement>,
    /// Node positions from the layout, before per-element offsets and correction.
    pub node_positions: Vec<Point>,
    /// Nearest-neighbor graph over the current element centers.
    pub graph: NnGraph,
    pub request: SynthesisRequest,
    pub provenance: Provenance,
    pub layout: LayoutSummary,
    #[serde(default)]
    pub corrections: Vec<CorrectionRecord>,
    #[serde(default)]
    pub warnings: Vec<SynthesisWarning>,
}

/// Stable identifier of an analysis: a digest of its serialized form.
pub fn analysis_id(analysis: &PatternAnalysis) -> String {
    let bytes = serde_json::to_vec(analysis).expect("analysis serializes");
    let digest = Sha256::digest(&bytes);
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn placed_graph(elements: &[PlacedElement], on_path: bool) -> NnGraph {
    let centers: Vec<Point> = elements.iter().map(|e| e.center).collect();
    if on_path {
        // Nodes are numbered in path order.
        let order: Vec<usize> = (0..centers.len()).collect();
        chain_graph(&order, &centers)
    } else {
        planar_graph(&centers)
    }
}

/// Greedy proximity-ordered correction pass over the nearest-neighbor edges.
pub fn correct(
    pattern: &mut SynthesizedPattern,
    analysis: &PatternAnalysis,
    behavior: Behavior,
    alpha: f64,
    rng: &mut crate::rng::PatternRng,
) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter("alpha must lie in [0, 1]".into()));
    }
    let graph = placed_graph(&pattern.elements, pattern.request.region.is_path());
    let els = &mut pattern.elements;
    let mut edges: Vec<(usize, usize, f64)> = graph
        .edges
        .iter()
        .map(|&(a, b)| (a, b, els[a].center.distance(els[b].center)))
        .collect();
    // Stable sort keeps edge order for equal proximity.
    edges.sort_by(|x, y| x.2.total_cmp(&y.2));

    for (a, b, _) in edges {
        if els[a].frozen || els[b].frozen {
            continue;
        }
        let a_to_b = graph.nearest[a] == b;
        let b_to_a = graph.nearest[b] == a;
        let (fixed, moved) = match (a_to_b, b_to_a) {
            (true, true) => (a.min(b), a.max(b)),
            (true, false) => (b, a),
            (false, true) => (a, b),
            // Tied neighbors that are nobody's recorded nearest: move the higher id.
            (false, false) => (a.min(b), a.max(b)),
        };
        let before = measure_placed_pair(&els[fixed], &els[moved])?;
        let targets = pair_targets(behavior, analysis, &before, rng);
        if targets.capped_draws > 0 {
            pattern.warnings.push(SynthesisWarning::SamplingCapped {
                draws: targets.capped_draws,
            });
        }
        let fixed_el = els[fixed].clone();
        match correct_pair(&fixed_el, &mut els[moved], &targets.props, alpha)? {
            Some(_) => {
                els[fixed].frozen = true;
                els[moved].frozen = true;
                pattern.corrections.push(CorrectionRecord {
                    fixed,
                    moved,
                    before,
                    target: targets.props,
                });
            }
            None => pattern
                .warnings
                .push(SynthesisWarning::CoincidentPairSkipped { a: fixed, b: moved }),
        }
    }
    pattern.graph = placed_graph(&pattern.elements, pattern.request.region.is_path());
    Ok(())
}

/// Runs the whole synthesis: layout, per-node instantiation, correction.
pub fn synthesize(analysis: &PatternAnalysis, request: &SynthesisRequest) -> Result<SynthesizedPattern> {
    request.validate()?;
    if analysis.n_ref < 2 || analysis.graph.edges.is_empty() {
        return Err(Error::InsufficientElements {
            found: analysis.n_ref,
        });
    }
    let frame = &analysis.params.frame;
    if frame.is_one_d() != request.region.is_path() {
        return Err(Error::InvalidParameter(
            "1D references synthesize along paths, 2D references inside polygons".into(),
        ));
    }
    let prox = *analysis
        .prox_stats()
        .ok_or(Error::InsufficientElements { found: analysis.n_ref })?;
    if !(prox.mean > 0.0) {
        return Err(Error::DegenerateDistribution);
    }
    let mut warnings = Vec::new();

    let n = match request.overrides.n {
        Some(n) => n,
        None => {
            let (n, clamped) = seed_count_checked(analysis, &request.region)?;
            if clamped {
                warnings.push(SynthesisWarning::SeedCountClamped {
                    requested: analysis.n_ref as f64 * request.region.measure() / analysis.measure_ref,
                });
            }
            n
        }
    };
    let r_star = request.overrides.r_star.unwrap_or(prox.ratio());
    let max_iters = request.overrides.max_iters.unwrap_or(DEFAULT_MAX_ITERS);
    let relaxed = lloyd_relax(n, &request.region, r_star, request.seed, max_iters)?;
    if !relaxed.converged {
        warnings.push(SynthesisWarning::LloydNotConverged {
            iterations: relaxed.iterations_used,
            ratio: relaxed.final_ratio,
        });
    }
    let layout = rescale_to_mean(&relaxed, prox.mean, &request.region)?;
    if layout.outside_region > 0 {
        warnings.push(SynthesisWarning::NodesOutsideRegion {
            count: layout.outside_region,
        });
    }
    let nodes = embed(&layout, &request.region);
    let node_positions: Vec<Point> = nodes.iter().map(|&(p, _)| p).collect();

    // Node spacing at instantiation time, for the copying shape rule.
    let node_graph = if request.region.is_path() {
        chain_graph(&(0..nodes.len()).collect::<Vec<_>>(), &node_positions)
    } else {
        planar_graph(&node_positions)
    };

    let eps = analysis.params.epsilon;
    let mut capped = 0;
    let mut elements = Vec::with_capacity(nodes.len());
    for (i, &(pos, tangent)) in nodes.iter().enumerate() {
        let mut rng = node_stream(request.seed, i);
        let assignment = assign_element_properties(request.behavior, analysis, &mut rng);
        capped += assignment.capped_draws;
        let source = match assignment.shape_source {
            Some(s) => s,
            None => {
                let nn_prox = pos.distance(node_positions[node_graph.nearest[i]]);
                match shape_from_similar_pair(analysis, nn_prox, &mut rng) {
                    Some(s) => s,
                    None => {
                        let ids: Vec<usize> = analysis.valid_ids().collect();
                        ids[rand::Rng::random_range(&mut rng, 0..ids.len())]
                    }
                }
            }
        };
        let source_el = &analysis.elements[source].element;
        elements.push(instantiate(
            i,
            pos,
            tangent,
            &assignment.props,
            source,
            source_el,
            frame,
            eps,
        ));
    }
    if capped > 0 {
        warnings.push(SynthesisWarning::SamplingCapped { draws: capped });
    }

    let graph = placed_graph(&elements, request.region.is_path());
    if graph.degenerate_fallback {
        warnings.push(SynthesisWarning::DegenerateGraph);
    }
    let mut pattern = SynthesizedPattern {
        elements,
        node_positions,
        graph,
        request: request.clone(),
        provenance: Provenance {
            analysis_id: analysis_id(analysis),
            seed: request.seed,
        },
        layout: crate::synthesis::LayoutSummary {
            nodes: n,
            iterations_used: layout.iterations_used,
            final_ratio: layout.final_ratio,
            r_star,
            outside_region: layout.outside_region,
        },
        corrections: Vec::new(),
        warnings,
    };
    let mut rng = stream(request.seed, CORRECTION_STREAM);
    correct(&mut pattern, analysis, request.behavior, request.alpha, &mut rng)?;
    Ok(pattern)
}

/// Orientation of a placed line relative to the X axis, in (−π/2, π/2].
pub fn placed_line_angle(e: &PlacedElement) -> f64 {
    normalize_line_angle(e.orientation)
}
