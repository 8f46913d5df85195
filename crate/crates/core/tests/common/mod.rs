//! Gesture fixtures shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use strokesynth::geom::Vec2;
use strokesynth::rng::{stream, PatternRng};
use strokesynth::{AnalysisParams, PatternType, ReferenceFrame, Stroke, TargetRegion};

pub struct Fixture {
    pub name: String,
    pub strokes: Vec<Stroke>,
    pub params: AnalysisParams,
    /// Target suitable for synthesis with this reference.
    pub region: TargetRegion,
}

struct Pen {
    strokes: Vec<Stroke>,
    rng: PatternRng,
}

impl Pen {
    fn new(seed: u64) -> Self {
        Pen {
            strokes: Vec::new(),
            rng: stream(seed, 7),
        }
    }

    fn jitter(&mut self, amount: f64) -> f64 {
        (self.rng.random::<f64>() - 0.5) * 2.0 * amount
    }

    fn push(&mut self, vertices: Vec<Vec2>) {
        let i = self.strokes.len() as u32;
        self.strokes.push(Stroke::new(vertices, i));
    }

    fn line(&mut self, a: Vec2, b: Vec2) {
        self.push(vec![a, b]);
    }

    /// Overlapping short strokes along `a → b`, each offset sideways by at most `wobble`.
    fn sketched(&mut self, a: Vec2, b: Vec2, pieces: usize, wobble: f64) {
        let n = (b - a).normalized().unwrap().perp();
        for k in 0..pieces {
            let t0 = (k as f64 / pieces as f64 - 0.08).max(0.0);
            let t1 = ((k + 1) as f64 / pieces as f64 + 0.08).min(1.0);
            let off = n * self.jitter(wobble);
            self.push(vec![a.lerp(b, t0) + off, a.lerp(b, t1) + off]);
        }
    }

    fn dashed(&mut self, a: Vec2, b: Vec2, dashes: usize, duty: f64) {
        for k in 0..dashes {
            let t0 = k as f64 / dashes as f64;
            let t1 = t0 + duty / dashes as f64;
            self.push(vec![a.lerp(b, t0), a.lerp(b, t1)]);
        }
    }

    /// Two strokes crossing off their midpoints, as drawn by hand.
    fn cross(&mut self, c: Vec2, half: f64, angle: f64) {
        let d = Vec2::from_angle(angle) * half;
        let e = d.perp();
        let shift = v(self.jitter(1.0), self.jitter(1.0));
        self.line(c - d * 0.7 + shift, c + d * 1.3 + shift);
        self.line(c - e * 1.25, c + e * 0.75);
    }

    fn circle(&mut self, c: Vec2, r: f64) {
        let pts = (0..=12)
            .map(|k| c + Vec2::from_angle(k as f64 * std::f64::consts::TAU / 12.0) * r)
            .collect();
        self.push(pts);
    }

    fn dot(&mut self, c: Vec2) {
        self.push(vec![c]);
    }

    fn scribble(&mut self, c: Vec2, r: f64) {
        let pts = (0..5)
            .map(|_| c + Vec2::new(self.jitter(r), self.jitter(r)) * 0.7)
            .collect();
        self.push(pts);
    }
}

fn v(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

fn rect_points(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Vec2> {
    vec![v(x0, y0), v(x1, y0), v(x1, y1), v(x0, y1)]
}

fn hatching_2d(name: &str, seed: u64, angle: f64, spacing: f64, style: u8, eps: f64) -> Fixture {
    let mut pen = Pen::new(seed);
    for row in 0..4 {
        for col in 0..3 {
            let c = v(40.0 + col as f64 * spacing * 5.0, 40.0 + row as f64 * spacing * 3.5)
                + v(pen.jitter(2.0), pen.jitter(2.0));
            let half = 9.0 + pen.jitter(2.0);
            let d = Vec2::from_angle(angle + pen.jitter(0.08)) * half;
            match style {
                0 => pen.line(c - d, c + d),
                1 => pen.sketched(c - d, c + d, 3, eps * 0.2),
                2 => pen.dashed(c - d, c + d, 3, 0.7),
                _ => pen.cross(c, half * 0.6, angle),
            }
        }
    }
    let (w, h) = (spacing * 5.0, spacing * 3.5);
    let area = rect_points(40.0 - w / 2.0, 40.0 - h / 2.0, 40.0 + 2.5 * w, 40.0 + 3.5 * h);
    Fixture {
        name: name.to_string(),
        strokes: pen.strokes,
        params: AnalysisParams::new(
            PatternType::Hatching,
            ReferenceFrame::TwoD { region: Some(area) },
            eps,
        ),
        region: TargetRegion::rect(0.0, 0.0, 160.0, 120.0).unwrap(),
    }
}

fn stippling_2d(name: &str, seed: u64, spacing: f64, style: u8, eps: f64) -> Fixture {
    let mut pen = Pen::new(seed);
    for row in 0..5 {
        for col in 0..5 {
            let c = v(20.0 + col as f64 * spacing, 20.0 + row as f64 * spacing)
                + v(pen.jitter(spacing * 0.25), pen.jitter(spacing * 0.25));
            match (style, (row + col) % 2) {
                (0, _) => pen.dot(c),
                (1, _) => pen.circle(c, eps * 0.3),
                (2, _) => pen.scribble(c, eps * 0.35),
                (_, 0) => pen.dot(c),
                _ => pen.circle(c, eps * 0.25),
            }
        }
    }
    let area = rect_points(20.0 - spacing / 2.0, 20.0 - spacing / 2.0, 20.0 + 4.5 * spacing, 20.0 + 4.5 * spacing);
    Fixture {
        name: name.to_string(),
        strokes: pen.strokes,
        params: AnalysisParams::new(
            PatternType::Stippling,
            ReferenceFrame::TwoD { region: Some(area) },
            eps,
        ),
        region: TargetRegion::rect(0.0, 0.0, 150.0, 110.0).unwrap(),
    }
}

fn hatching_1d(name: &str, seed: u64, angle: f64, spacing: f64, style: u8, eps: f64) -> Fixture {
    let mut pen = Pen::new(seed);
    let count = 10;
    for k in 0..count {
        let x = 10.0 + k as f64 * spacing + pen.jitter(spacing * 0.15);
        let off = pen.jitter(1.5);
        let half = match style {
            3 => 5.0 + 4.0 * (k % 3) as f64,
            _ => 8.0 + pen.jitter(1.5),
        };
        let d = Vec2::from_angle(angle + pen.jitter(0.06)) * half;
        let c = v(x, off);
        match style {
            1 => pen.sketched(c - d, c + d, 2, eps * 0.15),
            2 => pen.dashed(c - d, c + d, 2, 0.75),
            _ => pen.line(c - d, c + d),
        }
    }
    let length = 20.0 + count as f64 * spacing;
    Fixture {
        name: name.to_string(),
        strokes: pen.strokes,
        params: AnalysisParams::new(
            PatternType::Hatching,
            ReferenceFrame::one_d(v(0.0, 0.0), v(length, 0.0)).unwrap(),
            eps,
        ),
        region: TargetRegion::path(vec![v(0.0, 50.0), v(260.0, 50.0)]).unwrap(),
    }
}

/// The gesture corpus: sketched, dashed, crossed and straight hatching, dots, small
/// circles and scribbles, in 2D regions and along 1D axes.
pub fn corpus() -> Vec<Fixture> {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6};
    let mut out = Vec::new();
    for (i, a) in [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_2].into_iter().enumerate() {
        out.push(hatching_2d(&format!("straight-{i}"), 10 + i as u64, a, 6.0, 0, 4.0));
    }
    for (i, a) in [0.2, 1.0, -0.6].into_iter().enumerate() {
        out.push(hatching_2d(&format!("sketched-{i}"), 20 + i as u64, a, 6.0, 1, 4.0));
    }
    for (i, a) in [0.0, 0.9, 1.6].into_iter().enumerate() {
        out.push(hatching_2d(&format!("dashed-{i}"), 30 + i as u64, a, 6.0, 2, 4.0));
    }
    for (i, a) in [FRAC_PI_4, 0.3, 1.2].into_iter().enumerate() {
        out.push(hatching_2d(&format!("crosses-{i}"), 40 + i as u64, a, 6.0, 3, 2.0));
    }
    for (i, s) in [12.0, 16.0].into_iter().enumerate() {
        out.push(stippling_2d(&format!("dots-{i}"), 50 + i as u64, s, 0, 4.0));
    }
    for (i, s) in [12.0, 15.0, 18.0].into_iter().enumerate() {
        out.push(stippling_2d(&format!("circles-{i}"), 60 + i as u64, s, 1, 4.0));
    }
    for (i, s) in [13.0, 17.0].into_iter().enumerate() {
        out.push(stippling_2d(&format!("scribbles-{i}"), 70 + i as u64, s, 2, 4.0));
    }
    for (i, s) in [12.0, 16.0].into_iter().enumerate() {
        out.push(stippling_2d(&format!("dots-circles-{i}"), 80 + i as u64, s, 3, 4.0));
    }
    for (i, a) in [FRAC_PI_2, 1.2, 2.0].into_iter().enumerate() {
        out.push(hatching_1d(&format!("row-{i}"), 90 + i as u64, a, 8.0, 0, 3.0));
    }
    out.push(hatching_1d("row-sketched", 95, FRAC_PI_2, 9.0, 1, 3.0));
    out.push(hatching_1d("row-dashed", 96, FRAC_PI_2, 9.0, 2, 3.0));
    out.push(hatching_1d("row-lengths", 97, FRAC_PI_2, 8.0, 3, 3.0));
    out.push(hatching_1d("row-slanted", 98, 0.9, 10.0, 0, 3.0));
    out.push(hatching_1d("row-wide", 99, 1.4, 12.0, 0, 3.0));
    out
}
