//! Group analysis: nearest-neighbor structure over valid elements, the perceptual pair
//! measures (proximity, parallelism, overlapping, separation) and their statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::element::{
    cluster_elements, element_properties, Element, ElementProperties, ElementProperty,
};
use crate::error::{Error, Result};
use crate::geom::{signed_line_angle, Point, Vec2};
use crate::graph::{chain_graph, order_along, planar_graph, NnGraph};
use crate::model::{AnalysisParams, ReferenceFrame, Stroke};

/// A line reduced to what the pair measures need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineShape {
    pub center: Point,
    /// Unit direction.
    pub direction: Vec2,
    pub length: f64,
}

impl LineShape {
    pub fn of(e: &Element) -> Option<LineShape> {
        let axis = e.axis()?;
        Some(LineShape {
            center: axis.midpoint(),
            direction: axis.direction()?,
            length: axis.length(),
        })
    }
}

/// Intermediate vectors of the line-pair measures, oriented from `a` to `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePairGeometry {
    /// Center difference `c_b − c_a`.
    pub lambda: Vec2,
    /// Signed acute angle rotating `a` onto `b`, in (−π/2, π/2].
    pub theta: f64,
    /// Unit bisector direction.
    pub bisector: Vec2,
    /// Unit normal of the bisector.
    pub normal: Vec2,
    /// Center difference projected on the bisector.
    pub delta: Vec2,
    /// Center difference projected on the bisector normal.
    pub gamma: Vec2,
    /// Line lengths projected on the bisector.
    pub projected_lengths: (f64, f64),
}

impl LinePairGeometry {
    pub fn measure(a: &LineShape, b: &LineShape) -> LinePairGeometry {
        let da = a.direction;
        let mut db = b.direction;
        if da.dot(db) < 0.0 {
            db = -db;
        }
        // Sign-aligned unit vectors never cancel.
        let bisector = (da + db).normalized().unwrap_or(da);
        let normal = bisector.perp();
        let lambda = b.center - a.center;
        LinePairGeometry {
            lambda,
            theta: signed_line_angle(da, db),
            bisector,
            normal,
            delta: bisector * lambda.dot(bisector),
            gamma: normal * lambda.dot(normal),
            projected_lengths: (
                (a.length * da.dot(bisector)).abs(),
                (b.length * db.dot(bisector)).abs(),
            ),
        }
    }

    pub fn projected_length_sum(&self) -> f64 {
        self.projected_lengths.0 + self.projected_lengths.1
    }

    pub fn par(&self) -> f64 {
        (2.0 * self.theta / std::f64::consts::PI).abs().min(1.0)
    }

    pub fn ov(&self) -> Result<f64> {
        let l = self.projected_length_sum();
        if l <= 0.0 {
            return Err(Error::UndefinedOverlap);
        }
        Ok(2.0 * self.delta.norm() / l)
    }

    pub fn sep(&self) -> f64 {
        self.gamma.norm()
    }
}

/// The four pair measures; `par`, `ov` and `sep` exist only for line pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairProperties {
    pub prox: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub par: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ov: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sep: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairProperty {
    Prox,
    Par,
    Ov,
    Sep,
}

impl PairProperty {
    pub const ALL: [PairProperty; 4] = [
        PairProperty::Prox,
        PairProperty::Par,
        PairProperty::Ov,
        PairProperty::Sep,
    ];
}

impl PairProperties {
    pub fn get(&self, p: PairProperty) -> Option<f64> {
        match p {
            PairProperty::Prox => Some(self.prox),
            PairProperty::Par => self.par,
            PairProperty::Ov => self.ov,
            PairProperty::Sep => self.sep,
        }
    }

    pub fn set(&mut self, p: PairProperty, v: f64) {
        match p {
            PairProperty::Prox => self.prox = v,
            PairProperty::Par => self.par = Some(v),
            PairProperty::Ov => self.ov = Some(v),
            PairProperty::Sep => self.sep = Some(v),
        }
    }

    pub fn present(&self) -> impl Iterator<Item = (PairProperty, f64)> + '_ {
        PairProperty::ALL
            .into_iter()
            .filter_map(|p| self.get(p).map(|v| (p, v)))
    }

    pub fn of_lines(a: &LineShape, b: &LineShape) -> Result<PairProperties> {
        let g = LinePairGeometry::measure(a, b);
        Ok(PairProperties {
            prox: g.lambda.norm(),
            par: Some(g.par()),
            ov: Some(g.ov()?),
            sep: Some(g.sep()),
        })
    }
}

/// Pair measures between two valid elements. Line prox uses axis midpoints.
pub fn pair_properties(a: &Element, b: &Element) -> Result<PairProperties> {
    if a.is_line() != b.is_line() {
        return Err(Error::KindMismatch);
    }
    match (LineShape::of(a), LineShape::of(b)) {
        (Some(la), Some(lb)) => PairProperties::of_lines(&la, &lb),
        _ => Ok(PairProperties {
            prox: a.center().distance(b.center()),
            par: None,
            ov: None,
            sep: None,
        }),
    }
}

/// Mean, population standard deviation and range of a property.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl PropertyStats {
    pub fn from_samples(values: &[f64]) -> Option<PropertyStats> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(PropertyStats {
            // Rounding can push the mean a hair outside a constant sample's range.
            mean: mean.clamp(min, max),
            std: var.sqrt(),
            min,
            max,
        })
    }

    pub fn constant(v: f64) -> PropertyStats {
        PropertyStats {
            mean: v,
            std: 0.0,
            min: v,
            max: v,
        }
    }

    /// Coefficient of variation σ/μ (zero when μ is zero).
    pub fn ratio(&self) -> f64 {
        if self.mean == 0.0 {
            0.0
        } else {
            self.std / self.mean
        }
    }

    pub fn scaled(&self, k: f64) -> PropertyStats {
        let (a, b) = (self.min * k, self.max * k);
        PropertyStats {
            mean: self.mean * k,
            std: self.std * k.abs(),
            min: a.min(b),
            max: a.max(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    /// Element ids, `a < b`.
    pub a: usize,
    pub b: usize,
    pub props: PairProperties,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborGraph {
    /// Element ids of valid elements.
    pub nodes: Vec<usize>,
    /// Nearest neighbor (element id) of each entry of `nodes`.
    pub nearest: Vec<usize>,
    pub edges: Vec<GraphEdge>,
    #[serde(default)]
    pub degenerate_fallback: bool,
}

impl NeighborGraph {
    pub fn nearest_of(&self, element_id: usize) -> Option<usize> {
        let k = self.nodes.iter().position(|&n| n == element_id)?;
        Some(self.nearest[k])
    }
}

/// Builds the nearest-neighbor graph of the valid elements: a chain along the main axis
/// in 1D, filtered Delaunay edges in 2D.
pub fn build_neighbor_graph(elements: &[Element], frame: &ReferenceFrame) -> Result<NeighborGraph> {
    let nodes: Vec<usize> = (0..elements.len()).filter(|&i| elements[i].valid).collect();
    if nodes.len() < 2 {
        return Err(Error::InsufficientElements { found: nodes.len() });
    }
    let centers: Vec<Point> = nodes.iter().map(|&i| elements[i].center()).collect();
    let local: NnGraph = match frame {
        ReferenceFrame::OneD {
            origin, direction, ..
        } => chain_graph(&order_along(&centers, *origin, *direction), &centers),
        ReferenceFrame::TwoD { .. } => planar_graph(&centers),
    };
    let edges = local
        .edges
        .iter()
        .map(|&(a, b)| {
            let (ea, eb) = (nodes[a], nodes[b]);
            Ok(GraphEdge {
                a: ea,
                b: eb,
                props: pair_properties(&elements[ea], &elements[eb])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NeighborGraph {
        nearest: local.nearest.iter().map(|&k| nodes[k]).collect(),
        nodes,
        edges,
        degenerate_fallback: local.degenerate_fallback,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzedElement {
    pub element: Element,
    /// Present for valid elements.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub properties: Option<ElementProperties>,
}

/// Complete description of a reference pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternAnalysis {
    pub params: AnalysisParams,
    pub elements: Vec<AnalyzedElement>,
    pub graph: NeighborGraph,
    pub element_stats: BTreeMap<ElementProperty, PropertyStats>,
    pub pair_stats: BTreeMap<PairProperty, PropertyStats>,
    /// Number of valid elements.
    pub n_ref: usize,
    /// Reference area (2D, px²) or main-axis length (1D, px).
    pub measure_ref: f64,
}

impl PatternAnalysis {
    pub fn valid_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.element.valid)
            .map(|(i, _)| i)
    }

    pub fn properties(&self, id: usize) -> Option<&ElementProperties> {
        self.elements.get(id)?.properties.as_ref()
    }

    pub fn prox_stats(&self) -> Option<&PropertyStats> {
        self.pair_stats.get(&PairProperty::Prox)
    }

    /// All strokes of all elements, valid or not, in draw order.
    pub fn strokes(&self) -> Vec<Stroke> {
        let mut out: Vec<Stroke> = self
            .elements
            .iter()
            .flat_map(|e| e.element.strokes.iter().cloned())
            .collect();
        out.sort_by_key(|s| s.draw_index);
        out
    }
}

pub(crate) fn element_stats_of(
    props: impl Iterator<Item = ElementProperties> + Clone,
) -> BTreeMap<ElementProperty, PropertyStats> {
    ElementProperty::ALL
        .into_iter()
        .filter_map(|p| {
            let v: Vec<f64> = props.clone().filter_map(|e| e.get(p)).collect();
            PropertyStats::from_samples(&v).map(|s| (p, s))
        })
        .collect()
}

pub(crate) fn pair_stats_of(
    props: impl Iterator<Item = PairProperties> + Clone,
) -> BTreeMap<PairProperty, PropertyStats> {
    PairProperty::ALL
        .into_iter()
        .filter_map(|p| {
            let v: Vec<f64> = props.clone().filter_map(|e| e.get(p)).collect();
            PropertyStats::from_samples(&v).map(|s| (p, s))
        })
        .collect()
}

/// Full analysis pipeline: clustering, element properties, neighbor graph, pair measures
/// and statistics.
pub fn analyze(strokes: &[Stroke], params: &AnalysisParams) -> Result<PatternAnalysis> {
    let elements = cluster_elements(strokes, params)?;
    let graph = build_neighbor_graph(&elements, &params.frame)?;
    let elements: Vec<AnalyzedElement> = elements
        .into_iter()
        .map(|element| {
            let properties = element
                .valid
                .then(|| element_properties(&element, &params.frame));
            AnalyzedElement {
                element,
                properties,
            }
        })
        .collect();
    let element_stats = element_stats_of(elements.iter().filter_map(|e| e.properties));
    let pair_stats = pair_stats_of(graph.edges.iter().map(|e| e.props));
    let n_ref = graph.nodes.len();
    Ok(PatternAnalysis {
        measure_ref: params.frame.measure(strokes),
        params: params.clone(),
        elements,
        graph,
        element_stats,
        pair_stats,
        n_ref,
    })
}
