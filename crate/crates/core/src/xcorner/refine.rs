use crate::img::Raster;

/// Mean-shift settings for sub-pixel refinement.
#[derive(Clone, Copy, Debug)]
pub struct MeanShift {
    /// Half-width `w` of the `(2w + 1)^2` window.
    pub half_width: usize,
    pub max_iterations: usize,
    /// Stop once a step is shorter than this, in pixels.
    pub tolerance: f64,
}

impl Default for MeanShift {
    fn default() -> Self {
        Self {
            half_width: 2,
            max_iterations: 10,
            tolerance: 1e-3,
        }
    }
}

/// Overlap of pixel `[p - 0.5, p + 0.5]` with the window `[c - r, c + r]`.
#[inline]
fn overlap(p: f64, c: f64, r: f64) -> f64 {
    ((c + r).min(p + 0.5) - (c - r).max(p - 0.5)).clamp(0.0, 1.0)
}

/// Positively weighted centroid of the window centered at `(cx, cy)`.
///
/// The window edge cuts pixels fractionally, so the window is exactly centered
/// on the current estimate. Returns `None` when every weight is zero.
pub fn weighted_centroid(
    intensity: &Raster,
    cx: f64,
    cy: f64,
    half_width: usize,
) -> Option<(f64, f64)> {
    let r = half_width as f64 + 0.5;
    let x0 = ((cx - r).floor() as isize).max(0);
    let x1 = ((cx + r).ceil() as isize).min(intensity.width() as isize - 1);
    let y0 = ((cy - r).floor() as isize).max(0);
    let y1 = ((cy + r).ceil() as isize).min(intensity.height() as isize - 1);
    let (mut sw, mut sx, mut sy) = (0.0f64, 0.0f64, 0.0f64);
    for py in y0..=y1 {
        let oy = overlap(py as f64, cy, r);
        if oy == 0.0 {
            continue;
        }
        for px in x0..=x1 {
            let v = intensity.get(px as usize, py as usize);
            if v <= 0.0 {
                continue;
            }
            let wgt = v as f64 * oy * overlap(px as f64, cx, r);
            sw += wgt;
            sx += wgt * px as f64;
            sy += wgt * py as f64;
        }
    }
    (sw > 0.0).then(|| (sx / sw, sy / sw))
}

/// Iterates the weighted centroid from `seed` until it settles.
///
/// Weights are `max(intensity, 0)`. The result never leaves the disc of radius
/// `w + 0.5` around the seed.
pub fn meanshift_refine(intensity: &Raster, seed: (f64, f64), cfg: &MeanShift) -> (f64, f64) {
    let limit = cfg.half_width as f64 + 0.5;
    let (mut x, mut y) = seed;
    for _ in 0..cfg.max_iterations {
        let Some((mut nx, mut ny)) = weighted_centroid(intensity, x, y, cfg.half_width) else {
            break;
        };
        let (dx, dy) = (nx - seed.0, ny - seed.1);
        let d = dx.hypot(dy);
        if d > limit {
            nx = seed.0 + dx * limit / d;
            ny = seed.1 + dy * limit / d;
        }
        let step = (nx - x).hypot(ny - y);
        x = nx;
        y = ny;
        if step < cfg.tolerance {
            break;
        }
    }
    (x, y)
}
