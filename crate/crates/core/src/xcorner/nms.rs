use crate::img::Raster;

/// Local maximum of a box-filtered response.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    /// Integer anchor of the 2x2 block in the filtered raster.
    pub ix: usize,
    pub iy: usize,
    /// Location in image coordinates, i.e. the anchor shifted by half a pixel.
    pub x: f64,
    pub y: f64,
    pub value: f32,
}

/// Finds pixels that beat every neighbor within `radius` (Chebyshev) and
/// exceed `floor`.
///
/// Exact ties are broken toward the lower row-major index so a flat plateau
/// yields a single peak. Returned points carry the +0.5 offset that undoes the
/// box-filter shift.
pub fn nonmax_suppress(intensity: &Raster, radius: usize, floor: f32) -> Vec<Peak> {
    let radius = radius.max(1);
    let (w, h) = (intensity.width(), intensity.height());
    let data = intensity.data();
    let mut peaks = Vec::new();
    for y in 0..h {
        let y0 = y.saturating_sub(radius);
        let y1 = (y + radius).min(h - 1);
        'pixel: for x in 0..w {
            let idx = y * w + x;
            let v = data[idx];
            if v <= floor {
                continue;
            }
            let x0 = x.saturating_sub(radius);
            let x1 = (x + radius).min(w - 1);
            for ny in y0..=y1 {
                let row = &data[ny * w..(ny + 1) * w];
                for (nx, &q) in row.iter().enumerate().take(x1 + 1).skip(x0) {
                    let nidx = ny * w + nx;
                    if nidx == idx {
                        continue;
                    }
                    if q > v || (q == v && nidx < idx) {
                        continue 'pixel;
                    }
                }
            }
            peaks.push(Peak {
                ix: x,
                iy: y,
                x: x as f64 + 0.5,
                y: y as f64 + 0.5,
                value: v,
            });
        }
    }
    peaks
}
