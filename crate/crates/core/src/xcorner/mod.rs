//! Per-level x-corner detection: ring response, 2x2 smoothing, non-maximum
//! suppression, the filter cascade, mean-shift refinement and spoke
//! orientation.

pub mod cascade;
pub mod nms;
pub mod refine;
pub mod ring;
pub mod spoke;

use serde::{Deserialize, Serialize};

pub use cascade::{filter_cascade, reject_stage, Stage};
pub use nms::{nonmax_suppress, Peak};
pub use refine::{meanshift_refine, MeanShift};
pub use ring::{corner_intensity, xscore, SampleRing};
pub use spoke::{half_turn_distance, spoke_orientation, wrap_half_turn, SpokeConfig, SpokeResult};

use crate::img::{box_filter_2x2, gaussian_blur_3x3, GrayImage, Raster};

/// Tunables for per-level corner extraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct XCornerConfig {
    pub ring_radius: f32,
    pub nms_radius: usize,
    pub nms_floor: f32,
    /// Stage 1: fraction of the top level's strongest response.
    pub rel_threshold: f32,
    /// Stage 2 window half-width.
    pub pos_window_radius: usize,
    /// Stage 2: maximum number of positive responses in the window.
    pub pos_max: usize,
    /// Stage 3 circle radius.
    pub circle_radius: f32,
    pub eig_window_radius: usize,
    /// Stage 4: minimum structure-tensor eigenvalue, as a fraction of the
    /// strongest response in the top pyramid level.
    pub eig_threshold: f32,
    pub meanshift_half_width: usize,
    pub meanshift_max_iterations: usize,
    pub meanshift_tolerance: f64,
    pub spoke_length: f64,
    pub spoke_samples: usize,
    pub spoke_smoothing: f64,
    /// Refined candidates closer than this on one level are merged.
    pub merge_radius: f64,
}

impl Default for XCornerConfig {
    fn default() -> Self {
        Self {
            ring_radius: 3.0,
            nms_radius: 2,
            nms_floor: 0.0,
            rel_threshold: 0.02,
            pos_window_radius: 3,
            pos_max: 24,
            circle_radius: 3.0,
            eig_window_radius: 2,
            eig_threshold: 0.004,
            meanshift_half_width: 2,
            meanshift_max_iterations: 10,
            meanshift_tolerance: 1e-3,
            spoke_length: 4.0,
            spoke_samples: 4,
            spoke_smoothing: 1.0,
            merge_radius: 1.5,
        }
    }
}

impl XCornerConfig {
    pub fn ring(&self) -> SampleRing {
        SampleRing::new(self.ring_radius)
    }

    pub fn meanshift(&self) -> MeanShift {
        MeanShift {
            half_width: self.meanshift_half_width,
            max_iterations: self.meanshift_max_iterations,
            tolerance: self.meanshift_tolerance,
        }
    }

    pub fn spokes(&self) -> SpokeConfig {
        SpokeConfig {
            length: self.spoke_length,
            samples: self.spoke_samples,
            smoothing_sigma: self.spoke_smoothing,
        }
    }
}

/// An x-corner found on one pyramid level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CornerCandidate {
    /// Sub-pixel location in the level's own coordinates.
    pub x: f64,
    pub y: f64,
    pub level: usize,
    /// Box-filtered ring response at the peak.
    pub intensity_raw: f32,
    /// Rotation-invariant intensity from the spokes.
    pub intensity_spoke: f64,
    pub orientation: f64,
    pub contrast: f64,
}

/// Intermediate rasters of one level.
#[derive(Clone, Debug)]
pub struct LevelResponse {
    pub blurred: GrayImage,
    pub intensity: Raster,
    pub filtered: Raster,
}

impl LevelResponse {
    pub fn compute(gray: &GrayImage, cfg: &XCornerConfig) -> Self {
        let blurred = gaussian_blur_3x3(gray);
        let intensity = corner_intensity(&blurred, &cfg.ring());
        let filtered = box_filter_2x2(&intensity);
        Self {
            blurred,
            intensity,
            filtered,
        }
    }
}

/// Runs suppression, the cascade, refinement and spoke analysis on a level.
pub fn extract_candidates(
    resp: &LevelResponse,
    level: usize,
    top_level_max: f32,
    cfg: &XCornerConfig,
) -> Vec<CornerCandidate> {
    let peaks = nonmax_suppress(&resp.filtered, cfg.nms_radius, cfg.nms_floor);
    let survivors = filter_cascade(&peaks, &resp.intensity, &resp.blurred, top_level_max, cfg);
    let ms = cfg.meanshift();
    let spokes = cfg.spokes();
    let mut out: Vec<CornerCandidate> = survivors
        .iter()
        .map(|p| {
            let (x, y) = meanshift_refine(&resp.intensity, (p.x, p.y), &ms);
            let s = spoke_orientation(&resp.blurred, x, y, &spokes);
            CornerCandidate {
                x,
                y,
                level,
                intensity_raw: p.value,
                intensity_spoke: s.intensity,
                orientation: s.orientation,
                contrast: s.contrast,
            }
        })
        .collect();
    merge_duplicates(&mut out, cfg.merge_radius);
    out
}

/// Drops the weaker of any two candidates closer than `radius`.
fn merge_duplicates(cands: &mut Vec<CornerCandidate>, radius: f64) {
    if cands.len() < 2 || radius <= 0.0 {
        return;
    }
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| {
        cands[b]
            .intensity_raw
            .total_cmp(&cands[a].intensity_raw)
            .then(a.cmp(&b))
    });
    let cell = |v: f64| (v / radius).floor() as i64;
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> = Default::default();
    let mut keep = vec![false; cands.len()];
    for &i in &order {
        let c = cands[i];
        let (gx, gy) = (cell(c.x), cell(c.y));
        let clash = (gx - 1..=gx + 1).any(|x| {
            (gy - 1..=gy + 1).any(|y| {
                grid.get(&(x, y)).is_some_and(|v| {
                    v.iter()
                        .any(|&j| (cands[j].x - c.x).hypot(cands[j].y - c.y) < radius)
                })
            })
        });
        if !clash {
            keep[i] = true;
            grid.entry((gx, gy)).or_default().push(i);
        }
    }
    let mut idx = 0;
    cands.retain(|_| {
        idx += 1;
        keep[idx - 1]
    });
}
