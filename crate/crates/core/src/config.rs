//! JSON system definitions.
//!
//! ```json
//! {"maps": [{"ratio": 0.5, "translation": -1.0}, {"ratio": 0.5, "translation": 1.0}],
//!  "ambient": [-2.0, 2.0],
//!  "probabilities": [0.5, 0.5]}
//! ```
//!
//! `ambient` defaults to the attractor hull, `probabilities` to uniform.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{IfsSystem, Interval, SimilarityMap};
use crate::measures::BernoulliSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    pub ratio: f64,
    pub translation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub maps: Vec<MapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}

impl SystemFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidSystem(format!("bad system file: {e}")))
    }

    pub fn from_system(sys: &IfsSystem, p: Option<&BernoulliSpec>) -> Self {
        SystemFile {
            maps: sys
                .maps()
                .iter()
                .map(|m| MapSpec {
                    ratio: m.ratio(),
                    translation: m.translation(),
                })
                .collect(),
            ambient: Some([sys.ambient().lo, sys.ambient().hi]),
            probabilities: p.map(|p| p.probs().to_vec()),
        }
    }

    pub fn system(&self) -> Result<IfsSystem> {
        let maps = self
            .maps
            .iter()
            .map(|m| SimilarityMap::new(m.ratio, m.translation))
            .collect::<Result<Vec<_>>>()?;
        match self.ambient {
            Some([lo, hi]) => IfsSystem::new(maps, Interval::new(lo, hi)?),
            None => IfsSystem::with_hull(maps),
        }
    }

    /// The configured measure, uniform when absent.
    pub fn measure(&self) -> Result<BernoulliSpec> {
        match &self.probabilities {
            Some(p) => BernoulliSpec::new(p.clone()),
            None => BernoulliSpec::uniform(self.maps.len()),
        }
    }
}
