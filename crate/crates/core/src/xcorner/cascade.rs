//! Candidate filters, cheapest first.

use super::nms::Peak;
use super::XCornerConfig;
use crate::img::Raster;

/// Filter stage that rejected a peak.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stage {
    /// Too weak relative to the strongest response in the top pyramid level.
    Intensity,
    /// Too many positive responses around the peak.
    PositiveNeighbors,
    /// The gray circle around the peak does not alternate dark/light twice.
    GrayPattern,
    /// Smallest structure-tensor eigenvalue too small.
    Eigenvalue,
}

/// Returns the first stage that rejects `peak`, or `None` if it survives.
pub fn reject_stage(
    peak: &Peak,
    intensity: &Raster,
    blurred: &Raster,
    top_level_max: f32,
    cfg: &XCornerConfig,
) -> Option<Stage> {
    if peak.value < cfg.rel_threshold * top_level_max {
        return Some(Stage::Intensity);
    }
    if positive_count(intensity, peak.ix, peak.iy, cfg.pos_window_radius) > cfg.pos_max {
        return Some(Stage::PositiveNeighbors);
    }
    if gray_transitions(blurred, peak.x as f32, peak.y as f32, cfg.circle_radius) != 4 {
        return Some(Stage::GrayPattern);
    }
    if min_eigenvalue(blurred, peak.ix, peak.iy, cfg.eig_window_radius)
        < cfg.eig_threshold * top_level_max
    {
        return Some(Stage::Eigenvalue);
    }
    None
}

/// Keeps the peaks that pass every stage, preserving order.
pub fn filter_cascade(
    peaks: &[Peak],
    intensity: &Raster,
    blurred: &Raster,
    top_level_max: f32,
    cfg: &XCornerConfig,
) -> Vec<Peak> {
    peaks
        .iter()
        .filter(|p| reject_stage(p, intensity, blurred, top_level_max, cfg).is_none())
        .copied()
        .collect()
}

/// Number of strictly positive values in the square window around `(x, y)`.
pub fn positive_count(intensity: &Raster, x: usize, y: usize, radius: usize) -> usize {
    let (w, h) = (intensity.width(), intensity.height());
    let mut n = 0;
    for ny in y.saturating_sub(radius)..=(y + radius).min(h - 1) {
        for nx in x.saturating_sub(radius)..=(x + radius).min(w - 1) {
            if intensity.get(nx, ny) > 0.0 {
                n += 1;
            }
        }
    }
    n
}

pub const CIRCLE_SAMPLES: usize = 16;

/// Counts sign changes around a 16-sample circle thresholded at its own mean.
pub fn gray_transitions(blurred: &Raster, x: f32, y: f32, radius: f32) -> usize {
    let mut v = [0.0f32; CIRCLE_SAMPLES];
    for (i, s) in v.iter_mut().enumerate() {
        let a = i as f32 * std::f32::consts::TAU / CIRCLE_SAMPLES as f32;
        *s = blurred.sample(x + radius * a.cos(), y + radius * a.sin());
    }
    let mean = v.iter().sum::<f32>() / CIRCLE_SAMPLES as f32;
    let above: Vec<bool> = v.iter().map(|&s| s > mean).collect();
    (0..CIRCLE_SAMPLES)
        .filter(|&i| above[i] != above[(i + 1) % CIRCLE_SAMPLES])
        .count()
}

/// Smaller eigenvalue of the window-averaged gradient structure tensor.
///
/// Gradients are central differences with edge replication.
pub fn min_eigenvalue(blurred: &Raster, x: usize, y: usize, radius: usize) -> f32 {
    let (mut sxx, mut syy, mut sxy) = (0.0f32, 0.0f32, 0.0f32);
    let r = radius as isize;
    let (cx, cy) = (x as isize, y as isize);
    for py in cy - r..=cy + r {
        for px in cx - r..=cx + r {
            let gx = 0.5 * (blurred.get_clamped(px + 1, py) - blurred.get_clamped(px - 1, py));
            let gy = 0.5 * (blurred.get_clamped(px, py + 1) - blurred.get_clamped(px, py - 1));
            sxx += gx * gx;
            syy += gy * gy;
            sxy += gx * gy;
        }
    }
    let n = ((2 * r + 1) * (2 * r + 1)) as f32;
    let (a, c, b) = (sxx / n, syy / n, sxy / n);
    let half_trace = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    half_trace - disc
}
