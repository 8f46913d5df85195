//! Versioned JSON pattern documents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::PatternAnalysis;
use crate::model::{check_unique_draw_indices, AnalysisParams, Stroke};
use crate::synthesis::SynthesizedPattern;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternDocument {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub strokes: Vec<Stroke>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<AnalysisParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<PatternAnalysis>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub patterns: Vec<SynthesizedPattern>,
}

impl Default for PatternDocument {
    fn default() -> Self {
        PatternDocument {
            version: FORMAT_VERSION,
            strokes: Vec::new(),
            params: None,
            analysis: None,
            patterns: Vec::new(),
        }
    }
}

impl PatternDocument {
    pub fn with_strokes(strokes: Vec<Stroke>) -> Self {
        PatternDocument {
            strokes,
            ..Default::default()
        }
    }

    /// Checks stroke validity and that every stored id resolves.
    pub fn validate(&self) -> Result<()> {
        for s in &self.strokes {
            s.validate()?;
        }
        check_unique_draw_indices(&self.strokes)?;
        if let Some(p) = &self.params {
            p.validate()?;
        }
        if let Some(a) = &self.analysis {
            let n = a.elements.len();
            let bad = |what: &str| Error::InvalidParameter(format!("analysis {what} out of range"));
            if a.graph.nodes.iter().chain(&a.graph.nearest).any(|&i| i >= n) {
                return Err(bad("graph node"));
            }
            if a.graph.edges.iter().any(|e| e.a >= n || e.b >= n) {
                return Err(bad("graph edge"));
            }
            for p in &self.patterns {
                if p.elements.iter().any(|e| e.source_element_id >= n) {
                    return Err(bad("source element id"));
                }
            }
        }
        for p in &self.patterns {
            let m = p.elements.len();
            if p.graph.edges.iter().any(|&(a, b)| a >= m || b >= m) || p.graph.nearest.iter().any(|&i| i >= m) {
                return Err(Error::InvalidParameter("pattern graph id out of range".into()));
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}

fn parse_error(e: &serde_json::Error, path: String) -> Error {
    Error::Parse {
        path,
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn load_document(bytes: &[u8]) -> Result<PatternDocument> {
    let probe: VersionProbe = {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            parse_error(e.inner(), path)
        })?
    };
    if probe.version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(probe.version));
    }
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let doc: PatternDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        parse_error(e.inner(), path)
    })?;
    doc.validate()?;
    Ok(doc)
}

/// Pretty-printed JSON. Floats use the shortest decimal form that reads back exactly.
pub fn save_document(doc: &PatternDocument) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("document serializes");
    out.push(b'\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::model::{PatternType, ReferenceFrame, Rgba};

    #[test]
    fn empty_document() {
        let doc = load_document(br#"{"version": 1}"#).unwrap();
        assert_eq!(doc, PatternDocument::default());
    }

    #[test]
    fn round_trip() {
        let mut s = Stroke::from_coords(&[(0.1, 0.2), (1.0 / 3.0, 2.0f64.sqrt())], 0);
        s.color = Rgba::new(10, 20, 30, 40);
        s.opacity = 0.7;
        let doc = PatternDocument {
            strokes: vec![
                s,
                Stroke::from_coords(&[(5.0, 5.0)], 1),
                Stroke::from_coords(&[(-1e-300, 1e300), (3.0, 4.0)], 2),
            ],
            params: Some(AnalysisParams::new(
                PatternType::Hatching,
                ReferenceFrame::one_d(Vec2::ZERO, Vec2::new(7.0, 1.0)).unwrap(),
                3.5,
            )),
            ..Default::default()
        };
        let bytes = save_document(&doc);
        assert_eq!(load_document(&bytes).unwrap(), doc);
        assert_eq!(save_document(&load_document(&bytes).unwrap()), bytes);
    }

    #[test]
    fn truncated_reports_position() {
        let doc = PatternDocument::with_strokes(vec![Stroke::from_coords(&[(0.0, 0.0)], 0)]);
        let bytes = save_document(&doc);
        let cut = &bytes[..bytes.len() / 2];
        match load_document(cut) {
            Err(Error::Parse { line, .. }) => assert!(line > 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        let text = br#"{"version": 1, "strokes": [{"vertices": [[0, 0]], "width": "wide", "color": [0,0,0,255], "opacity": 1, "draw_index": 0}]}"#;
        match load_document(text) {
            Err(Error::Parse { path, .. }) => assert_eq!(path, "strokes[0].width"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_version() {
        assert_eq!(load_document(br#"{"version": 9}"#), Err(Error::UnsupportedVersion(9)));
    }

    #[test]
    fn duplicate_draw_index_rejected() {
        let doc = PatternDocument::with_strokes(vec![
            Stroke::from_coords(&[(0.0, 0.0)], 3),
            Stroke::from_coords(&[(1.0, 0.0)], 3),
        ]);
        assert_eq!(load_document(&save_document(&doc)), Err(Error::DuplicateDrawIndex(3)));
    }
}
