//! The eight-point sampling ring and the x-corner intensity response.

use crate::img::Raster;

/// Eight sub-pixel offsets on a circle, 45 degrees apart.
///
/// Labels `a, b, c, d` sit at 0, 90, 180 and 270 degrees, `e, f, g, h` at 45,
/// 135, 225 and 315 degrees. Angles are measured in image coordinates (y
/// down). Offsets are built from exact axis values and a shared diagonal
/// component, so opposite samples are exact point reflections.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRing {
    radius: f32,
    offsets: [(f32, f32); 8],
}

impl SampleRing {
    pub fn new(radius: f32) -> Self {
        let r = radius;
        let d = radius * std::f32::consts::FRAC_1_SQRT_2;
        Self {
            radius,
            offsets: [
                (r, 0.0),
                (0.0, r),
                (-r, 0.0),
                (0.0, -r),
                (d, d),
                (-d, d),
                (-d, -d),
                (d, -d),
            ],
        }
    }

    pub fn radius(&self) -> f32 {
        self.radius
    }

    /// Offsets in label order `a..h`.
    pub fn offsets(&self) -> &[(f32, f32); 8] {
        &self.offsets
    }
}

impl Default for SampleRing {
    fn default() -> Self {
        Self::new(3.0)
    }
}

/// Quadratic contrast product of four samples taken 90 degrees apart.
///
/// Positive when opposite samples sit on the same side of their mean.
#[inline]
pub fn xscore(v1: f32, v2: f32, v3: f32, v4: f32) -> f32 {
    let mu = (v1 + v2 + v3 + v4) * 0.25;
    (v1 - mu) * (v3 - mu) + (v2 - mu) * (v4 - mu)
}

/// Per-pixel maximum of the axis and diagonal ring scores.
///
/// `blurred` must already be smoothed with the 3x3 Gaussian; the ring is
/// sampled bilinearly with edge replication.
pub fn corner_intensity(blurred: &Raster, ring: &SampleRing) -> Raster {
    let (w, h) = (blurred.width(), blurred.height());
    let src = blurred.data();

    struct Tap {
        dx: isize,
        dy: isize,
        w00: f32,
        w10: f32,
        w01: f32,
        w11: f32,
    }
    let taps: Vec<Tap> = ring
        .offsets()
        .iter()
        .map(|&(ox, oy)| {
            let fx = ox.floor();
            let fy = oy.floor();
            let ax = ox - fx;
            let ay = oy - fy;
            Tap {
                dx: fx as isize,
                dy: fy as isize,
                w00: (1.0 - ax) * (1.0 - ay),
                w10: ax * (1.0 - ay),
                w01: (1.0 - ax) * ay,
                w11: ax * ay,
            }
        })
        .collect();

    let mut out = Raster::new(w, h);
    let mut rows = vec![vec![0.0f32; w]; 8];
    let clamp_x = |x: isize| x.clamp(0, w as isize - 1) as usize;
    for y in 0..h {
        for (tap, row) in taps.iter().zip(rows.iter_mut()) {
            let y0 = (y as isize + tap.dy).clamp(0, h as isize - 1) as usize;
            let y1 = (y as isize + tap.dy + 1).clamp(0, h as isize - 1) as usize;
            let r0 = &src[y0 * w..(y0 + 1) * w];
            let r1 = &src[y1 * w..(y1 + 1) * w];
            // columns where x + dx and x + dx + 1 are both inside the image
            let lo = (-tap.dx).max(0) as usize;
            let hi = (w as isize - 1 - tap.dx).clamp(0, w as isize) as usize;
            let lo = lo.min(hi);
            for x in (0..lo).chain(hi..w) {
                let x0 = clamp_x(x as isize + tap.dx);
                let x1 = clamp_x(x as isize + tap.dx + 1);
                row[x] = tap.w00 * r0[x0] + tap.w10 * r0[x1] + tap.w01 * r1[x0] + tap.w11 * r1[x1];
            }
            let base = (lo as isize + tap.dx) as usize;
            let n = hi - lo;
            let (a0, a1) = (&r0[base..base + n], &r0[base + 1..base + 1 + n]);
            let (b0, b1) = (&r1[base..base + n], &r1[base + 1..base + 1 + n]);
            for (i, v) in row[lo..hi].iter_mut().enumerate() {
                *v = tap.w00 * a0[i] + tap.w10 * a1[i] + tap.w01 * b0[i] + tap.w11 * b1[i];
            }
        }
        let out_row = &mut out.data_mut()[y * w..(y + 1) * w];
        for (x, o) in out_row.iter_mut().enumerate() {
            let axis = xscore(rows[0][x], rows[1][x], rows[2][x], rows[3][x]);
            let diag = xscore(rows[4][x], rows[5][x], rows[6][x], rows[7][x]);
            *o = axis.max(diag);
        }
    }
    out
}
