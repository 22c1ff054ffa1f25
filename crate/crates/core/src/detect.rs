//! The full detection pipeline and its configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::connect::{find_connections, EdgeCandidate, EdgeConfig};
use crate::error::{Error, Result};
use crate::grid::{build_grids, ChessboardGrid, CornerGraph, GridConfig};
use crate::img::{build_pyramid, GrayImage, Pyramid};
use crate::scalesel::{associate_levels, CornerTrack, ScaleConfig};
use crate::xcorner::{extract_candidates, CornerCandidate, LevelResponse, XCornerConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PyramidConfig {
    /// Smallest side allowed for the coarsest level.
    pub min_dimension: usize,
}

impl Default for PyramidConfig {
    fn default() -> Self {
        Self { min_dimension: 60 }
    }
}

/// Every tunable of the detector in one flat record.
///
/// Stored as a TOML file of `key = value` lines; missing keys take their
/// defaults and unknown keys are rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorConfig {
    #[serde(flatten)]
    pub pyramid: PyramidConfig,
    #[serde(flatten)]
    pub xcorner: XCornerConfig,
    #[serde(flatten)]
    pub scale: ScaleConfig,
    #[serde(flatten)]
    pub edges: EdgeConfig,
    #[serde(flatten)]
    pub grid: GridConfig,
}

impl DetectorConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::ConfigSyntax(e.to_string()))?;
        let known = Self::default().to_table();
        if let Some(key) = table
            .keys()
            .find(|k| !known.contains_key(*k) && *k != "known_shape")
        {
            return Err(Error::ConfigSyntax(format!("unknown key {key:?}")));
        }
        let cfg: Self = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::ConfigSyntax(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_table()).expect("config serializes")
    }

    fn to_table(&self) -> toml::Table {
        toml::Table::try_from(self).expect("config serializes to a table")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        let x = &self.xcorner;
        let e = &self.edges;
        if self.pyramid.min_dimension < crate::img::MIN_PYRAMID_DIMENSION {
            return bad("min_dimension must be at least 16");
        }
        if !(x.ring_radius > 0.0) || !(x.circle_radius > 0.0) || !(x.spoke_length > 0.0) {
            return bad("ring_radius, circle_radius and spoke_length must be positive");
        }
        if x.spoke_samples == 0 || x.meanshift_max_iterations == 0 {
            return bad("spoke_samples and meanshift_max_iterations must be positive");
        }
        if !(0.0..=1.0).contains(&x.rel_threshold) {
            return bad("rel_threshold must lie in [0, 1]");
        }
        if !(self.scale.match_radius > 0.0) {
            return bad("match_radius must be positive");
        }
        if e.samples_n == 0 || !(e.keep_fraction > 0.0 && e.keep_fraction <= 1.0) {
            return bad("samples_n must be positive and keep_fraction in (0, 1]");
        }
        if !(e.lateral_min > 0.0 && e.lateral_min <= e.lateral_max) {
            return bad("lateral clamp must satisfy 0 < lateral_min <= lateral_max");
        }
        if !(e.skip_scale >= 0.0) || !(e.perp_tolerance >= 0.0) {
            return bad("skip_scale and perp_tolerance must be nonnegative");
        }
        Ok(())
    }
}

/// Everything the pipeline produced for one image.
#[derive(Clone, Debug)]
pub struct DetectionDetails {
    pub pyramid_levels: usize,
    /// Candidates per pyramid level, coordinates in that level.
    pub candidates: Vec<Vec<CornerCandidate>>,
    pub tracks: Vec<CornerTrack>,
    /// Every scored pair, accepted or not.
    pub edges: Vec<EdgeCandidate>,
    /// Connections left after voting and pruning.
    pub graph: CornerGraph,
    pub grids: Vec<ChessboardGrid>,
}

#[derive(Clone, Debug)]
pub struct Detector {
    config: DetectorConfig,
}

impl Detector {
    pub fn new(config: DetectorConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn detect(&self, img: &GrayImage) -> Result<Vec<ChessboardGrid>> {
        Ok(self.detect_with_details(img)?.grids)
    }

    pub fn detect_with_details(&self, img: &GrayImage) -> Result<DetectionDetails> {
        if img.width() == 0 || img.height() == 0 {
            return Err(Error::EmptyImage {
                width: img.width(),
                height: img.height(),
            });
        }
        let cfg = &self.config;
        let pyramid: Pyramid = build_pyramid(img, cfg.pyramid.min_dimension)?;
        let responses: Vec<LevelResponse> = pyramid
            .levels()
            .iter()
            .map(|l| LevelResponse::compute(l, &cfg.xcorner))
            .collect();
        let top_max = responses
            .last()
            .map(|r| r.filtered.max_value())
            .unwrap_or(0.0);
        let candidates: Vec<Vec<CornerCandidate>> = if top_max > 0.0 {
            responses
                .iter()
                .enumerate()
                .map(|(k, r)| extract_candidates(r, k, top_max, &cfg.xcorner))
                .collect()
        } else {
            vec![Vec::new(); responses.len()]
        };
        let tracks = associate_levels(&candidates, &cfg.scale);
        let edges = find_connections(&responses[0].blurred, &tracks, &cfg.edges);
        let mut graph = CornerGraph::from_connections(&tracks, &edges);
        let grids = build_grids(&mut graph, &tracks, &cfg.grid);
        Ok(DetectionDetails {
            pyramid_levels: pyramid.len(),
            candidates,
            tracks,
            edges,
            graph,
            grids,
        })
    }
}
