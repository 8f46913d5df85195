//! Deterministic SVG 1.1 export.

use std::fmt::Write;

use base64::Engine;

use crate::geom::{bounding_box, Point, Vec2};
use crate::model::Stroke;
use crate::region::TargetRegion;
use crate::synthesis::SynthesizedPattern;

/// Raster placed under the strokes: top-left corner at `origin`, `pixel_size` pattern units
/// per pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct Background {
    pub png: Vec<u8>,
    pub width_px: u32,
    pub height_px: u32,
    pub origin: Point,
    pub pixel_size: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SvgStyle {
    /// Fixed view box `(min, max)`; computed from the content when absent.
    pub view_box: Option<(Point, Point)>,
    pub background: Option<Background>,
    /// Draw the target region outline.
    pub show_region: bool,
}

fn num(v: f64) -> String {
    // Shortest exact form; avoids "-0".
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn hex(s: &Stroke) -> String {
    format!("#{:02x}{:02x}{:02x}", s.color.r, s.color.g, s.color.b)
}

fn path_data(s: &Stroke) -> String {
    let mut d = String::new();
    for (i, v) in s.vertices.iter().enumerate() {
        let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, num(v.x), num(v.y));
    }
    if s.vertices.len() == 1 {
        // Zero-length subpath: round caps draw it as a dot.
        let v = s.vertices[0];
        let _ = write!(d, " L{} {}", num(v.x), num(v.y));
    }
    d
}

fn region_points(r: &TargetRegion) -> &[Point] {
    match r {
        TargetRegion::Path { points } | TargetRegion::Polygon { points } => points,
    }
}

fn content_box(pattern: &SynthesizedPattern, style: &SvgStyle) -> (Point, Point) {
    let mut pts: Vec<Point> = region_points(&pattern.request.region).to_vec();
    let mut pad: f64 = 0.0;
    for e in &pattern.elements {
        for s in &e.strokes {
            pts.extend_from_slice(&s.vertices);
            pad = pad.max(s.width);
        }
    }
    if let Some(bg) = &style.background {
        pts.push(bg.origin);
        pts.push(
            bg.origin
                + Vec2::new(bg.width_px as f64, bg.height_px as f64) * bg.pixel_size,
        );
    }
    match bounding_box(&pts) {
        Some((lo, hi)) => (lo - Vec2::new(pad, pad), hi + Vec2::new(pad, pad)),
        None => (Vec2::ZERO, Vec2::new(1.0, 1.0)),
    }
}

/// One `<path>` per stroke, ordered by node id then member-stroke order.
pub fn export_svg(pattern: &SynthesizedPattern, style: &SvgStyle) -> String {
    let (lo, hi) = style.view_box.unwrap_or_else(|| content_box(pattern, style));
    let (w, h) = ((hi.x - lo.x).max(1e-9), (hi.y - lo.y).max(1e-9));
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        num(w),
        num(h),
        num(lo.x),
        num(lo.y),
        num(w),
        num(h)
    );
    if let Some(bg) = &style.background {
        let data = base64::engine::general_purpose::STANDARD.encode(&bg.png);
        let _ = writeln!(
            out,
            "<image x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" preserveAspectRatio=\"none\" xlink:href=\"data:image/png;base64,{}\"/>",
            num(bg.origin.x),
            num(bg.origin.y),
            num(bg.width_px as f64 * bg.pixel_size),
            num(bg.height_px as f64 * bg.pixel_size),
            data
        );
    }
    if style.show_region {
        let r = &pattern.request.region;
        let pts: Vec<String> = region_points(r)
            .iter()
            .map(|p| format!("{},{}", num(p.x), num(p.y)))
            .collect();
        let tag = if r.is_path() { "polyline" } else { "polygon" };
        let _ = writeln!(
            out,
            "<{tag} points=\"{}\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4 4\" stroke-width=\"0.5\"/>",
            pts.join(" ")
        );
    }
    out.push_str("<g fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n");
    let mut order: Vec<usize> = (0..pattern.elements.len()).collect();
    order.sort_by_key(|&i| pattern.elements[i].node_id);
    for i in order {
        for s in &pattern.elements[i].strokes {
            let opacity = s.opacity * s.color.a as f64 / 255.0;
            let _ = writeln!(
                out,
                "<path d=\"{}\" stroke=\"{}\" stroke-width=\"{}\" stroke-opacity=\"{}\"/>",
                path_data(s),
                hex(s),
                num(s.width),
                num(opacity)
            );
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Reference strokes drawn on their own.
pub fn strokes_svg(strokes: &[Stroke]) -> String {
    let pts: Vec<Point> = strokes.iter().flat_map(|s| s.vertices.iter().copied()).collect();
    let pad = strokes.iter().map(|s| s.width).fold(0.0, f64::max);
    let (lo, hi) = bounding_box(&pts)
        .map(|(lo, hi)| (lo - Vec2::new(pad, pad), hi + Vec2::new(pad, pad)))
        .unwrap_or((Vec2::ZERO, Vec2::new(1.0, 1.0)));
    let (w, h) = ((hi.x - lo.x).max(1e-9), (hi.y - lo.y).max(1e-9));
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        num(w),
        num(h),
        num(lo.x),
        num(lo.y),
        num(w),
        num(h)
    );
    out.push_str("<g fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n");
    let mut sorted: Vec<&Stroke> = strokes.iter().collect();
    sorted.sort_by_key(|s| s.draw_index);
    for s in sorted {
        let _ = writeln!(
            out,
            "<path d=\"{}\" stroke=\"{}\" stroke-width=\"{}\" stroke-opacity=\"{}\"/>",
            path_data(s),
            hex(s),
            num(s.width),
            num(s.opacity * s.color.a as f64 / 255.0)
        );
    }
    out.push_str("</g>\n</svg>\n");
    out
}
