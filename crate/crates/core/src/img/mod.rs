//! Grayscale rasters, the small fixed filters the detector relies on, and the
//! dyadic image pyramid.
//!
//! Coordinates follow the pixel-center convention: pixel `(x, y)` covers
//! `[x - 0.5, x + 0.5] x [y - 0.5, y + 0.5]`. Every filter replicates the
//! border pixels.

mod io;

pub use io::{load_gray, save_gray_pgm, save_gray_png, save_gray_png16};

use crate::error::{Error, Result};

/// Dense single-channel `f32` raster in row-major order.
///
/// Used both for normalized gray images (values in `[0, 1]`) and for derived
/// response maps, which may be negative.
#[derive(Clone, Debug, PartialEq)]
pub struct Raster {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

/// A raster holding normalized intensities in `[0, 1]`.
pub type GrayImage = Raster;

impl Raster {
    pub fn new(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn filled(width: usize, height: usize, value: f32) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage { width, height });
        }
        if data.len() != width * height {
            return Err(Error::BufferSize {
                expected: width * height,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f32) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f32) {
        self.data[y * self.width + x] = v;
    }

    /// Pixel lookup with edge replication for out-of-range coordinates.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f32 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.data[yc * self.width + xc]
    }

    /// Bilinear interpolation at a sub-pixel location, replicating the border.
    #[inline]
    pub fn sample(&self, x: f32, y: f32) -> f32 {
        let fx = x.floor();
        let fy = y.floor();
        let ax = x - fx;
        let ay = y - fy;
        let x0 = fx as isize;
        let y0 = fy as isize;
        let v00 = self.get_clamped(x0, y0);
        let v10 = self.get_clamped(x0 + 1, y0);
        let v01 = self.get_clamped(x0, y0 + 1);
        let v11 = self.get_clamped(x0 + 1, y0 + 1);
        let top = v00 + (v10 - v00) * ax;
        let bottom = v01 + (v11 - v01) * ax;
        top + (bottom - top) * ay
    }

    /// Pointwise `scale * v + offset`.
    pub fn map_affine(&self, scale: f32, offset: f32) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| scale * v + offset).collect(),
        }
    }

    pub fn max_value(&self) -> f32 {
        self.data.iter().copied().fold(f32::NEG_INFINITY, f32::max)
    }

    /// Rotates the raster by 90 degrees clockwise as displayed (y axis down).
    ///
    /// Pixel `(x, y)` moves to `(height - 1 - y, x)`.
    pub fn rotate90(&self) -> Self {
        let (w, h) = (self.width, self.height);
        Self::from_fn(h, w, |nx, ny| self.get(ny, h - 1 - nx))
    }
}

/// Multi-channel integer raster as delivered by an image decoder.
#[derive(Clone, Debug)]
pub struct RawImage {
    pub width: usize,
    pub height: usize,
    pub channels: u8,
    pub bit_depth: u8,
    /// Interleaved samples, `width * height * channels` of them.
    pub samples: Vec<u16>,
}

/// Collapses a raw raster to one channel and scales it to `[0, 1]`.
///
/// Color channels are averaged without weighting. For gray+alpha and RGBA
/// input the alpha channel is not part of the mean.
pub fn to_gray_normalized(raw: &RawImage) -> Result<GrayImage> {
    if raw.width == 0 || raw.height == 0 {
        return Err(Error::EmptyImage {
            width: raw.width,
            height: raw.height,
        });
    }
    let full_scale = match raw.bit_depth {
        8 => 255.0f32,
        16 => 65535.0f32,
        other => return Err(Error::UnsupportedBitDepth(other)),
    };
    let channels = raw.channels as usize;
    let color = match raw.channels {
        1 | 2 => 1,
        3 | 4 => 3,
        other => return Err(Error::UnsupportedChannels(other)),
    };
    let expected = raw.width * raw.height * channels;
    if raw.samples.len() != expected {
        return Err(Error::BufferSize {
            expected,
            actual: raw.samples.len(),
        });
    }
    let data = raw
        .samples
        .chunks_exact(channels)
        .map(|px| {
            let sum: f32 = px[..color].iter().map(|&v| v as f32).sum();
            (sum / color as f32 / full_scale).clamp(0.0, 1.0)
        })
        .collect();
    Raster::from_vec(raw.width, raw.height, data)
}

/// Separable `[1, 2, 1] / 4` smoothing in both axes.
pub fn gaussian_blur_3x3(img: &Raster) -> Raster {
    let (w, h) = (img.width, img.height);
    let src = &img.data;
    let mut tmp = vec![0.0f32; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        let out = &mut tmp[y * w..(y + 1) * w];
        for x in 0..w {
            let l = row[x.saturating_sub(1)];
            let r = row[(x + 1).min(w - 1)];
            out[x] = 0.25 * l + 0.5 * row[x] + 0.25 * r;
        }
    }
    let mut data = vec![0.0f32; w * h];
    for y in 0..h {
        let up = &tmp[y.saturating_sub(1) * w..][..w];
        let mid = &tmp[y * w..][..w];
        let down = &tmp[(y + 1).min(h - 1) * w..][..w];
        let out = &mut data[y * w..(y + 1) * w];
        for x in 0..w {
            out[x] = 0.25 * up[x] + 0.5 * mid[x] + 0.25 * down[x];
        }
    }
    Raster {
        width: w,
        height: h,
        data,
    }
}

/// Mean of the 2x2 block whose top-left pixel is the output pixel.
///
/// The result is shifted by half a pixel: output `(x, y)` describes the point
/// `(x + 0.5, y + 0.5)` of the input. The last row and column replicate.
pub fn box_filter_2x2(src: &Raster) -> Raster {
    let (w, h) = (src.width, src.height);
    let mut data = vec![0.0f32; w * h];
    for y in 0..h {
        let r0 = &src.data[y * w..][..w];
        let r1 = &src.data[(y + 1).min(h - 1) * w..][..w];
        let out = &mut data[y * w..(y + 1) * w];
        for x in 0..w {
            let x1 = (x + 1).min(w - 1);
            out[x] = 0.25 * (r0[x] + r0[x1] + r1[x] + r1[x1]);
        }
    }
    Raster {
        width: w,
        height: h,
        data,
    }
}

/// Halves both dimensions (rounding down) by averaging 2x2 blocks.
pub fn downsample_2x2(src: &Raster) -> Raster {
    let (w, h) = (src.width / 2, src.height / 2);
    let sw = src.width;
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        let r0 = &src.data[2 * y * sw..][..sw];
        let r1 = &src.data[(2 * y + 1) * sw..][..sw];
        for x in 0..w {
            data.push(0.25 * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]));
        }
    }
    Raster {
        width: w,
        height: h,
        data,
    }
}

/// Smallest `min_dimension` accepted by [`build_pyramid`].
pub const MIN_PYRAMID_DIMENSION: usize = 16;

/// Dyadic image pyramid; level 0 is the full-resolution input.
#[derive(Clone, Debug)]
pub struct Pyramid {
    levels: Vec<GrayImage>,
}

impl Pyramid {
    pub fn levels(&self) -> &[GrayImage] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &GrayImage {
        &self.levels[k]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Scale factor of level `k` relative to level 0.
    pub fn scale(k: usize) -> f64 {
        (1u64 << k) as f64
    }

    /// Maps a level-`k` coordinate to full resolution, aligning the centers of
    /// averaged blocks.
    pub fn to_full_resolution(k: usize, v: f64) -> f64 {
        Self::scale(k) * (v + 0.5) - 0.5
    }

    /// Inverse of [`Pyramid::to_full_resolution`].
    pub fn from_full_resolution(k: usize, v: f64) -> f64 {
        (v + 0.5) / Self::scale(k) - 0.5
    }
}

/// Builds levels by repeated 2x2 averaging until another halving would take
/// the smaller side below `min_dimension`.
pub fn build_pyramid(img: &GrayImage, min_dimension: usize) -> Result<Pyramid> {
    if min_dimension < MIN_PYRAMID_DIMENSION {
        return Err(Error::InvalidConfig(format!(
            "pyramid min_dimension {min_dimension} is below {MIN_PYRAMID_DIMENSION}"
        )));
    }
    let mut levels = vec![img.clone()];
    loop {
        let last = levels.last().expect("at least one level");
        if (last.width / 2).min(last.height / 2) < min_dimension {
            break;
        }
        let next = downsample_2x2(last);
        levels.push(next);
    }
    Ok(Pyramid { levels })
}
