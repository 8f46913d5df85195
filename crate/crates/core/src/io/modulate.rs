//! Stroke attributes driven by background tone.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Point, Vec2};
use crate::model::Rgba;
use crate::synthesis::SynthesizedPattern;

/// Linear-light luminance raster. Pixel `(i, j)` covers
/// `origin + [i, i+1) × [j, j+1) · pixel_size`.
#[derive(Debug, Clone, PartialEq)]
pub struct LuminanceImage {
    pub width: u32,
    pub height: u32,
    /// Row-major, values in [0, 1].
    pub values: Vec<f64>,
    pub origin: Point,
    pub pixel_size: f64,
}

fn srgb_to_linear(c: u8) -> f64 {
    let c = c as f64 / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

impl LuminanceImage {
    pub fn from_luminance(width: u32, height: u32, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Image("empty image".into()));
        }
        if values.len() != (width as usize) * (height as usize) {
            return Err(Error::Image("pixel count does not match dimensions".into()));
        }
        Ok(LuminanceImage {
            width,
            height,
            values,
            origin: Vec2::ZERO,
            pixel_size: 1.0,
        })
    }

    /// Decodes a PNG; luminance uses Rec. 709 weights on linearized sRGB.
    pub fn from_png(bytes: &[u8]) -> Result<Self> {
        let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
            .map_err(|e| Error::Image(e.to_string()))?
            .to_rgba8();
        let values = img
            .pixels()
            .map(|p| {
                0.2126 * srgb_to_linear(p[0]) + 0.7152 * srgb_to_linear(p[1]) + 0.0722 * srgb_to_linear(p[2])
            })
            .collect();
        LuminanceImage::from_luminance(img.width(), img.height(), values)
    }

    pub fn placed(mut self, origin: Point, pixel_size: f64) -> Self {
        self.origin = origin;
        self.pixel_size = pixel_size;
        self
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.width as usize + i]
    }

    /// Bilinear sample between pixel centers; positions outside clamp to the edge pixels.
    pub fn sample(&self, p: Point) -> f64 {
        let u = ((p.x - self.origin.x) / self.pixel_size - 0.5).clamp(0.0, (self.width - 1) as f64);
        let v = ((p.y - self.origin.y) / self.pixel_size - 0.5).clamp(0.0, (self.height - 1) as f64);
        let (i0, j0) = (u.floor() as usize, v.floor() as usize);
        let (i1, j1) = ((i0 + 1).min(self.width as usize - 1), (j0 + 1).min(self.height as usize - 1));
        let (fu, fv) = (u - i0 as f64, v - j0 as f64);
        let top = self.at(i0, j0) * (1.0 - fu) + self.at(i1, j0) * fu;
        let bottom = self.at(i0, j1) * (1.0 - fu) + self.at(i1, j1) * fu;
        top * (1.0 - fv) + bottom * fv
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Breakpoint {
    /// Luminance in [0, 1].
    pub at: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorStop {
    pub at: f64,
    pub color: Rgba,
}

/// Piecewise-linear maps from luminance to stroke attributes. An empty map leaves the
/// attribute unchanged; values beyond the first and last breakpoints hold constant.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AttributeMap {
    /// Multiplier on stroke width.
    #[serde(default)]
    pub width: Vec<Breakpoint>,
    /// Multiplier on stroke opacity.
    #[serde(default)]
    pub opacity: Vec<Breakpoint>,
    /// Replacement stroke color.
    #[serde(default)]
    pub color: Vec<ColorStop>,
}

fn increasing(at: impl Iterator<Item = f64>) -> bool {
    let mut prev = f64::NEG_INFINITY;
    for a in at {
        if !(0.0..=1.0).contains(&a) || a <= prev {
            return false;
        }
        prev = a;
    }
    true
}

fn interpolate<T: Copy>(stops: &[(f64, T)], l: f64, lerp: impl Fn(T, T, f64) -> T) -> Option<T> {
    let first = stops.first()?;
    if l <= first.0 {
        return Some(first.1);
    }
    for w in stops.windows(2) {
        if l <= w[1].0 {
            return Some(lerp(w[0].1, w[1].1, (l - w[0].0) / (w[1].0 - w[0].0)));
        }
    }
    stops.last().map(|s| s.1)
}

impl AttributeMap {
    pub fn validate(&self) -> Result<()> {
        if !increasing(self.width.iter().map(|b| b.at))
            || !increasing(self.opacity.iter().map(|b| b.at))
            || !increasing(self.color.iter().map(|b| b.at))
        {
            return Err(Error::InvalidParameter(
                "attribute map breakpoints must increase strictly within [0, 1]".into(),
            ));
        }
        if self.width.iter().any(|b| !(b.value.is_finite() && b.value > 0.0)) {
            return Err(Error::InvalidParameter("width multipliers must be positive".into()));
        }
        if self.opacity.iter().any(|b| !(0.0..=1.0).contains(&b.value)) {
            return Err(Error::InvalidParameter("opacity multipliers must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn scalar(stops: &[Breakpoint], l: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = stops.iter().map(|b| (b.at, b.value)).collect();
        interpolate(&pts, l, |a, b, t| a + (b - a) * t)
    }

    pub fn width_at(&self, l: f64) -> Option<f64> {
        Self::scalar(&self.width, l)
    }

    pub fn opacity_at(&self, l: f64) -> Option<f64> {
        Self::scalar(&self.opacity, l)
    }

    pub fn color_at(&self, l: f64) -> Option<Rgba> {
        let pts: Vec<(f64, Rgba)> = self.color.iter().map(|c| (c.at, c.color)).collect();
        interpolate(&pts, l, |a, b, t| {
            let mix = |x: u8, y: u8| (x as f64 + (y as f64 - x as f64) * t).round() as u8;
            Rgba::new(mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b), mix(a.a, b.a))
        })
    }
}

/// Applies `map` to every stroke of each element using the luminance at the element
/// center. Vertex coordinates are not touched.
pub fn modulate_attributes(
    pattern: &SynthesizedPattern,
    background: &LuminanceImage,
    map: &AttributeMap,
) -> Result<SynthesizedPattern> {
    map.validate()?;
    let mut out = pattern.clone();
    for e in &mut out.elements {
        let l = background.sample(e.center).clamp(0.0, 1.0);
        let (w, o, c) = (map.width_at(l), map.opacity_at(l), map.color_at(l));
        for s in &mut e.strokes {
            if let Some(w) = w {
                s.width *= w;
            }
            if let Some(o) = o {
                s.opacity = (s.opacity * o).clamp(0.0, 1.0);
            }
            if let Some(c) = c {
                s.color = c;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::svg::tests::single_stroke_pattern;
    use crate::model::Stroke;

    fn pattern() -> SynthesizedPattern {
        single_stroke_pattern(Stroke::from_coords(&[(0.0, 0.0), (1.0, 0.0)], 0))
    }

    #[test]
    fn white_identity_is_noop() {
        let img = LuminanceImage::from_luminance(2, 2, vec![1.0; 4]).unwrap();
        let p = pattern();
        assert_eq!(modulate_attributes(&p, &img, &AttributeMap::default()).unwrap(), p);
    }

    #[test]
    fn black_to_transparent() {
        let img = LuminanceImage::from_luminance(2, 2, vec![0.0; 4]).unwrap();
        let map = AttributeMap {
            opacity: vec![Breakpoint { at: 0.0, value: 0.0 }, Breakpoint { at: 1.0, value: 1.0 }],
            ..Default::default()
        };
        let out = modulate_attributes(&pattern(), &img, &map).unwrap();
        assert_eq!(out.elements[0].strokes[0].opacity, 0.0);
        assert_eq!(out.elements[0].strokes[0].vertices, pattern().elements[0].strokes[0].vertices);
    }

    #[test]
    fn gradient_midpoint() {
        // Columns 0..=10 with pixel centers at x = i + 0.5, luminance x/10 at the centers.
        let w = 11;
        let values: Vec<f64> = (0..2).flat_map(|_| (0..w).map(|i| i as f64 / 10.0)).collect();
        let img = LuminanceImage::from_luminance(w, 2, values).unwrap();
        let mut p = pattern();
        p.elements[0].center = Vec2::new(5.5, 1.0);
        let map = AttributeMap {
            width: vec![Breakpoint { at: 0.0, value: 0.5 }, Breakpoint { at: 1.0, value: 2.0 }],
            ..Default::default()
        };
        let out = modulate_attributes(&p, &img, &map).unwrap();
        assert!((out.elements[0].strokes[0].width - 1.25).abs() < 1e-12);
    }

    #[test]
    fn bilinear_oracle() {
        let img = LuminanceImage::from_luminance(2, 2, vec![0.0, 1.0, 0.5, 0.25]).unwrap();
        let (u, v) = (0.3, 0.6);
        let expect = (1.0 - v) * ((1.0 - u) * 0.0 + u * 1.0) + v * ((1.0 - u) * 0.5 + u * 0.25);
        assert!((img.sample(Vec2::new(0.5 + u, 0.5 + v)) - expect).abs() < 1e-12);
        assert_eq!(img.sample(Vec2::new(-10.0, -10.0)), 0.0);
    }

    #[test]
    fn png_luminance() {
        let mut buf = Vec::new();
        let img = image::RgbaImage::from_pixel(3, 1, image::Rgba([255, 255, 255, 255]));
        img.write_to(&mut std::io::Cursor::new(&mut buf), image::ImageFormat::Png).unwrap();
        let l = LuminanceImage::from_png(&buf).unwrap();
        assert!((l.sample(Vec2::new(1.5, 0.5)) - 1.0).abs() < 1e-12);
        assert!(LuminanceImage::from_luminance(0, 0, vec![]).is_err());
    }

    #[test]
    fn color_stops_interpolate() {
        let map = AttributeMap {
            color: vec![
                ColorStop { at: 0.0, color: Rgba::new(0, 0, 0, 255) },
                ColorStop { at: 1.0, color: Rgba::new(200, 100, 50, 255) },
            ],
            ..Default::default()
        };
        assert_eq!(map.color_at(0.5), Some(Rgba::new(100, 50, 25, 255)));
        let bad = AttributeMap {
            width: vec![Breakpoint { at: 0.5, value: 1.0 }, Breakpoint { at: 0.2, value: 1.0 }],
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
