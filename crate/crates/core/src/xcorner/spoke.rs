//! Orientation, rotation-invariant intensity and contrast from radial spokes.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use crate::img::Raster;

pub const SPOKES: usize = 32;
const HALF: usize = SPOKES / 2;
const QUARTER: usize = SPOKES / 4;

#[derive(Clone, Copy, Debug)]
pub struct SpokeConfig {
    /// Spoke length in pixels.
    pub length: f64,
    /// Bilinear samples per spoke.
    pub samples: usize,
    /// Gaussian smoothing of the folded orientation score, in bins.
    pub smoothing_sigma: f64,
}

impl Default for SpokeConfig {
    fn default() -> Self {
        Self {
            length: 4.0,
            samples: 4,
            smoothing_sigma: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpokeResult {
    /// Direction of one grid edge through the corner, in `[-pi/2, pi/2)`.
    ///
    /// The light sector's bisector lies at `orientation + pi/4`, so
    /// neighboring corners of opposite polarity differ by `pi/2`.
    pub orientation: f64,
    /// Smoothed peak of the orientation score.
    pub intensity: f64,
    /// Light minus dark spoke average along the chosen sector bisectors.
    pub contrast: f64,
}

/// Mean intensity along one spoke; samples outside the image are dropped.
fn spoke(img: &Raster, x: f64, y: f64, angle: f64, cfg: &SpokeConfig) -> f64 {
    let (s, c) = angle.sin_cos();
    let (w, h) = (img.width() as f64, img.height() as f64);
    let mut sum = 0.0;
    let mut n = 0usize;
    for j in 1..=cfg.samples {
        let r = cfg.length * j as f64 / cfg.samples as f64;
        let (px, py) = (x + r * c, y + r * s);
        if px < 0.0 || py < 0.0 || px > w - 1.0 || py > h - 1.0 {
            continue;
        }
        sum += img.sample(px as f32, py as f32) as f64;
        n += 1;
    }
    if n == 0 {
        img.sample(x as f32, y as f32) as f64
    } else {
        sum / n as f64
    }
}

/// Wraps an angle into `[-pi/2, pi/2)`.
pub fn wrap_half_turn(a: f64) -> f64 {
    let r = (a + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    if r >= FRAC_PI_2 {
        r - PI
    } else {
        r
    }
}

/// Smallest distance between two angles modulo `pi`, in `[0, pi/2]`.
pub fn half_turn_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

/// Folded, signed orientation score per half-circle bin.
///
/// Bin `i` covers spoke `i` and its opposite spoke; the score is how much
/// brighter those spokes are than the ones a quarter turn further.
pub fn orientation_scores(img: &Raster, x: f64, y: f64, cfg: &SpokeConfig) -> [f64; HALF] {
    let mut s = [0.0f64; SPOKES];
    for (i, v) in s.iter_mut().enumerate() {
        *v = spoke(img, x, y, i as f64 * TAU / SPOKES as f64, cfg);
    }
    let mut folded = [0.0f64; HALF];
    for (i, f) in folded.iter_mut().enumerate() {
        let d = |k: usize| s[k % SPOKES] - s[(k + QUARTER) % SPOKES];
        *f = d(i) + d(i + HALF);
    }
    folded
}

fn smooth_circular(v: &[f64; HALF], sigma: f64) -> [f64; HALF] {
    if sigma <= 0.0 {
        return *v;
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    let mut out = [0.0f64; HALF];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, kw) in kernel.iter().enumerate() {
            let j = (i as isize + k as isize - radius).rem_euclid(HALF as isize) as usize;
            acc += kw * v[j];
        }
        *o = acc / norm;
    }
    out
}

/// Estimates corner orientation, spoke intensity and contrast at `(x, y)`.
pub fn spoke_orientation(img: &Raster, x: f64, y: f64, cfg: &SpokeConfig) -> SpokeResult {
    let raw = orientation_scores(img, x, y, cfg);
    let smooth = smooth_circular(&raw, cfg.smoothing_sigma);
    let mut best = 0;
    for i in 1..HALF {
        if smooth[i] > smooth[best] {
            best = i;
        }
    }
    let l = smooth[(best + HALF - 1) % HALF];
    let c = smooth[best];
    let r = smooth[(best + 1) % HALF];
    let denom = l - 2.0 * c + r;
    let (offset, peak) = if denom < 0.0 {
        let o = (0.5 * (l - r) / denom).clamp(-0.5, 0.5);
        (o, c - 0.25 * (l - r) * o)
    } else {
        (0.0, c)
    };
    let bisector = (best as f64 + offset) * PI / HALF as f64;
    let light = spoke(img, x, y, bisector, cfg) + spoke(img, x, y, bisector + PI, cfg);
    let dark =
        spoke(img, x, y, bisector + FRAC_PI_2, cfg) + spoke(img, x, y, bisector - FRAC_PI_2, cfg);
    SpokeResult {
        orientation: wrap_half_turn(bisector - FRAC_PI_4),
        intensity: peak.max(0.0),
        contrast: (0.5 * (light - dark)).max(0.0),
    }
}
