//! Persistence, SVG export, background-driven attribute modulation and level-of-detail
//! synthesis.

pub mod document;
pub mod lod;
pub mod modulate;
pub mod svg;

pub use document::{load_document, save_document, PatternDocument, FORMAT_VERSION};
pub use lod::{synthesize_lod, LodOptions};
pub use modulate::{modulate_attributes, AttributeMap, ColorStop, LuminanceImage, Breakpoint};
pub use svg::{export_svg, SvgStyle};
