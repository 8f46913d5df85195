//! Property assignment policies. Sampling draws from truncated Gaussians fitted to the
//! reference statistics, copying reuses individual reference values, cloning reuses whole
//! reference elements and pairs.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::element::ElementProperties;
use crate::group::{PairProperties, PairProperty, PatternAnalysis, PropertyStats};

/// Rejection attempts before falling back to the clamped mean.
pub const MAX_SAMPLING_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    Sampling,
    Copying,
    Cloning,
}

impl std::str::FromStr for Behavior {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sampling" => Ok(Behavior::Sampling),
            "copying" => Ok(Behavior::Copying),
            "cloning" => Ok(Behavior::Cloning),
            other => Err(format!("unknown behavior '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub value: f64,
    /// The rejection cap was hit and the clamped mean returned.
    pub capped: bool,
}

/// Inverse-CDF Gaussian draw restricted to `[min, max]` by rejection.
pub fn sample_property<R: Rng + ?Sized>(stats: &PropertyStats, rng: &mut R) -> Sample {
    if stats.std <= 0.0 || stats.min >= stats.max {
        return Sample {
            value: stats.mean.clamp(stats.min, stats.max),
            capped: false,
        };
    }
    let unit = Normal::standard();
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let u: f64 = rng.random();
        let x = stats.mean + stats.std * unit.inverse_cdf(u);
        if x >= stats.min && x <= stats.max {
            return Sample {
                value: x,
                capped: false,
            };
        }
    }
    Sample {
        value: stats.mean.clamp(stats.min, stats.max),
        capped: true,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Reference element whose shape is used; `None` when the shape is chosen later from
    /// the node's nearest-neighbor pair (copying).
    pub shape_source: Option<usize>,
    pub props: ElementProperties,
    pub capped_draws: usize,
}

fn pick<R: Rng + ?Sized>(ids: &[usize], rng: &mut R) -> usize {
    ids[rng.random_range(0..ids.len())]
}

/// Chooses element properties (and possibly the shape source) for one synthesized node.
pub fn assign_element_properties<R: Rng + ?Sized>(
    behavior: Behavior,
    analysis: &PatternAnalysis,
    rng: &mut R,
) -> Assignment {
    let ids: Vec<usize> = analysis
        .valid_ids()
        .filter(|&i| analysis.properties(i).is_some())
        .collect();
    assert!(!ids.is_empty(), "analysis has no valid elements");
    let template = *analysis.properties(ids[0]).expect("valid element has properties");
    match behavior {
        Behavior::Sampling => {
            let mut props = template;
            let mut capped = 0;
            for (p, _) in template.present() {
                if let Some(stats) = analysis.element_stats.get(&p) {
                    let s = sample_property(stats, rng);
                    capped += s.capped as usize;
                    props.set(p, s.value);
                }
            }
            Assignment {
                shape_source: Some(pick(&ids, rng)),
                props,
                capped_draws: capped,
            }
        }
        Behavior::Copying => {
            let mut props = template;
            for (p, _) in template.present() {
                let donor = pick(&ids, rng);
                if let Some(v) = analysis.properties(donor).and_then(|d| d.get(p)) {
                    props.set(p, v);
                }
            }
            Assignment {
                shape_source: None,
                props,
                capped_draws: 0,
            }
        }
        Behavior::Cloning => {
            let source = pick(&ids, rng);
            Assignment {
                shape_source: Some(source),
                props: *analysis.properties(source).expect("valid element has properties"),
                capped_draws: 0,
            }
        }
    }
}

/// Index of the reference edge whose `prop` value is closest to `value` (ties: lower index).
pub fn nearest_reference_edge(analysis: &PatternAnalysis, prop: PairProperty, value: f64) -> Option<usize> {
    analysis
        .graph
        .edges
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.props.get(prop).map(|v| (i, (v - value).abs())))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
}

/// Shape source chosen from the reference pair with the most similar proximity.
pub fn shape_from_similar_pair<R: Rng + ?Sized>(
    analysis: &PatternAnalysis,
    prox: f64,
    rng: &mut R,
) -> Option<usize> {
    let edge = &analysis.graph.edges[nearest_reference_edge(analysis, PairProperty::Prox, prox)?];
    Some(if rng.random::<bool>() { edge.a } else { edge.b })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTargets {
    pub props: PairProperties,
    pub capped_draws: usize,
}

/// Target pair measures for a synthesized pair whose current measures are `current`.
pub fn pair_targets<R: Rng + ?Sized>(
    behavior: Behavior,
    analysis: &PatternAnalysis,
    current: &PairProperties,
    rng: &mut R,
) -> PairTargets {
    let mut props = *current;
    let mut capped = 0;
    match behavior {
        Behavior::Sampling => {
            for (p, _) in current.present() {
                if let Some(stats) = analysis.pair_stats.get(&p) {
                    let s = sample_property(stats, rng);
                    capped += s.capped as usize;
                    props.set(p, s.value);
                }
            }
        }
        Behavior::Copying => {
            for (p, v) in current.present() {
                if let Some(i) = nearest_reference_edge(analysis, p, v) {
                    if let Some(t) = analysis.graph.edges[i].props.get(p) {
                        props.set(p, t);
                    }
                }
            }
        }
        Behavior::Cloning => {
            if let Some(i) = nearest_reference_edge(analysis, PairProperty::Prox, current.prox) {
                let reference = analysis.graph.edges[i].props;
                for (p, _) in current.present() {
                    if let Some(t) = reference.get(p) {
                        props.set(p, t);
                    }
                }
            }
        }
    }
    PairTargets {
        props,
        capped_draws: capped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn zero_std_returns_mean() {
        let mut rng = stream(1, 0);
        let s = PropertyStats::constant(4.0);
        for _ in 0..100 {
            assert_eq!(sample_property(&s, &mut rng).value, 4.0);
        }
    }

    #[test]
    fn draws_respect_bounds() {
        let mut rng = stream(2, 0);
        let s = PropertyStats {
            mean: 0.0,
            std: 1.0,
            min: -1.0,
            max: 1.0,
        };
        for _ in 0..10_000 {
            let v = sample_property(&s, &mut rng).value;
            assert!((-1.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn unreachable_range_caps() {
        let mut rng = stream(3, 0);
        let s = PropertyStats {
            mean: 0.0,
            std: 1e-6,
            min: 5.0,
            max: 6.0,
        };
        let out = sample_property(&s, &mut rng);
        assert!(out.capped);
        assert_eq!(out.value, 5.0);
    }

    #[test]
    fn behavior_parses() {
        assert_eq!("cloning".parse::<Behavior>(), Ok(Behavior::Cloning));
        assert!("mimic".parse::<Behavior>().is_err());
    }
}
