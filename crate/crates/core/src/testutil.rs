//! Small synthetic patches shared by unit tests.

use crate::img::Raster;

const DARK: f32 = 0.1;
const LIGHT: f32 = 0.9;
const SS: usize = 8;

fn supersample(w: usize, h: usize, light: impl Fn(f64, f64) -> bool) -> Raster {
    Raster::from_fn(w, h, |x, y| {
        let mut n = 0;
        for j in 0..SS {
            for i in 0..SS {
                let px = x as f64 - 0.5 + (i as f64 + 0.5) / SS as f64;
                let py = y as f64 - 0.5 + (j as f64 + 0.5) / SS as f64;
                if light(px, py) {
                    n += 1;
                }
            }
        }
        let f = n as f32 / (SS * SS) as f32;
        DARK + (LIGHT - DARK) * f
    })
}

/// Four-quadrant x-corner at `(cx, cy)` whose edges run along `angle` and
/// `angle + pi/2`; the light quadrants contain the direction `angle + pi/4`.
pub fn checker_patch(w: usize, h: usize, cx: f64, cy: f64, angle: f64) -> Raster {
    let (s, c) = angle.sin_cos();
    supersample(w, h, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        let u = c * dx + s * dy;
        let v = -s * dx + c * dy;
        u * v > 0.0
    })
}

/// Straight step edge through the patch center with normal direction `angle`.
pub fn step_edge(w: usize, h: usize, angle: f32) -> Raster {
    let (s, c) = (angle as f64).sin_cos();
    let (cx, cy) = (w as f64 / 2.0, h as f64 / 2.0);
    supersample(w, h, |x, y| c * (x - cx) + s * (y - cy) > 0.0)
}
