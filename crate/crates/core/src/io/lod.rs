//! Level-of-detail synthesis: the same reference at several target scales.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{analyze, PatternAnalysis};
use crate::model::{AnalysisParams, ReferenceFrame};
use crate::region::TargetRegion;
use crate::rng::derive_seed;
use crate::synthesis::{synthesize, SynthesisRequest, SynthesizedPattern};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LodOptions {
    /// Scale element extents with the region instead of keeping device-unit sizes.
    #[serde(default)]
    pub scale_extents: bool,
}

/// The reference re-analyzed with all geometry scaled by `k` about the origin.
pub fn scaled_analysis(analysis: &PatternAnalysis, k: f64) -> Result<PatternAnalysis> {
    let strokes: Vec<_> = analysis
        .strokes()
        .iter()
        .map(|s| {
            let mut t = s.map_vertices(|p| p * k);
            t.width *= k;
            t
        })
        .collect();
    let frame = match &analysis.params.frame {
        ReferenceFrame::OneD {
            origin,
            direction,
            length,
        } => ReferenceFrame::OneD {
            origin: *origin * k,
            direction: *direction,
            length: length * k,
        },
        ReferenceFrame::TwoD { region } => ReferenceFrame::TwoD {
            region: region.as_ref().map(|r| r.iter().map(|&p| p * k).collect()),
        },
    };
    let params = AnalysisParams::new(analysis.params.pattern_type, frame, analysis.params.epsilon * k);
    analyze(&strokes, &params)
}

/// One pattern per scale; scale `i` synthesizes into `region` scaled by `scales[i]` about
/// its centroid, with seed `derive_seed(template.seed, i)`.
pub fn synthesize_lod(
    analysis: &PatternAnalysis,
    region: &TargetRegion,
    scales: &[f64],
    template: &SynthesisRequest,
    options: LodOptions,
) -> Result<Vec<SynthesizedPattern>> {
    if scales.is_empty() {
        return Err(Error::InvalidParameter("at least one scale is required".into()));
    }
    if scales.iter().any(|&k| !(k.is_finite() && k > 0.0)) {
        return Err(Error::InvalidParameter("scales must be positive".into()));
    }
    scales
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let mut request = template.clone();
            request.region = region.scaled(k);
            request.seed = derive_seed(template.seed, i);
            if let Some(n) = template.overrides.n {
                let factor = if region.is_path() { k } else { k * k };
                request.overrides.n = Some(((n as f64 * factor).round() as usize).max(2));
            }
            if options.scale_extents {
                synthesize(&scaled_analysis(analysis, k)?, &request)
            } else {
                synthesize(analysis, &request)
            }
        })
        .collect()
}
