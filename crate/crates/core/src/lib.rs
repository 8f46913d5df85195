//! Example-based hatching and stippling: analyze a drawn reference pattern into
//! perceptual elements and pair statistics, then synthesize new patterns with the same
//! statistics along paths and inside regions.

pub mod behavior;
pub mod distribution;
pub mod element;
pub mod error;
pub mod geom;
pub mod graph;
pub mod group;
pub mod hausdorff;
pub mod io;
pub mod model;
pub mod region;
pub mod rng;
pub mod synthesis;

pub use behavior::Behavior;
pub use distribution::{lloyd_relax, rescale_to_mean, seed_count, Distribution, Positions};
pub use element::{
    cluster_elements, element_properties, fit_line, fit_point, try_merge, Element, ElementKind,
    ElementProperties, ElementProperty, Extent,
};
pub use error::{Error, Result};
pub use geom::{LineSeg, Point, Vec2};
pub use group::{
    analyze, build_neighbor_graph, pair_properties, NeighborGraph, PairProperties, PairProperty,
    PatternAnalysis, PropertyStats,
};
pub use model::{AnalysisParams, PatternType, ReferenceFrame, Rgba, Stroke};
pub use region::TargetRegion;
pub use synthesis::{synthesize, PlacedElement, SynthesisRequest, SynthesizedPattern};
