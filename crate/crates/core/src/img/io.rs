use std::path::Path;

use image::{DynamicImage, ImageBuffer, Luma};

use super::{to_gray_normalized, GrayImage, RawImage};
use crate::error::{Error, Result};

fn raw_from_dynamic(img: DynamicImage) -> RawImage {
    let (width, height) = (img.width() as usize, img.height() as usize);
    let (channels, bit_depth, samples): (u8, u8, Vec<u16>) = match img {
        DynamicImage::ImageLuma8(b) => (1, 8, widen(b.into_raw())),
        DynamicImage::ImageLumaA8(b) => (2, 8, widen(b.into_raw())),
        DynamicImage::ImageRgb8(b) => (3, 8, widen(b.into_raw())),
        DynamicImage::ImageRgba8(b) => (4, 8, widen(b.into_raw())),
        DynamicImage::ImageLuma16(b) => (1, 16, b.into_raw()),
        DynamicImage::ImageLumaA16(b) => (2, 16, b.into_raw()),
        DynamicImage::ImageRgb16(b) => (3, 16, b.into_raw()),
        DynamicImage::ImageRgba16(b) => (4, 16, b.into_raw()),
        other => (4, 16, other.into_rgba16().into_raw()),
    };
    RawImage {
        width,
        height,
        channels,
        bit_depth,
        samples,
    }
}

fn widen(v: Vec<u8>) -> Vec<u16> {
    v.into_iter().map(u16::from).collect()
}

/// Reads a PNG (8 or 16 bit) or binary PGM and normalizes it to `[0, 1]`.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let reader = image::ImageReader::open(path)
        .map_err(|e| Error::io(path, e))?
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    let img = reader.decode().map_err(|source| Error::Decode {
        path: path.to_path_buf(),
        source,
    })?;
    to_gray_normalized(&raw_from_dynamic(img))
}

fn to_luma8(img: &GrayImage) -> ImageBuffer<Luma<u8>, Vec<u8>> {
    let data = img
        .data()
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    ImageBuffer::from_raw(img.width() as u32, img.height() as u32, data)
        .expect("buffer matches dimensions")
}

/// Writes an 8-bit grayscale PNG.
pub fn save_gray_png(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    to_luma8(img)
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| Error::Encode {
            path: path.to_path_buf(),
            source,
        })
}

/// Writes a 16-bit grayscale PNG, keeping more intensity resolution for
/// rendered scenes.
pub fn save_gray_png16(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let data = img
        .data()
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * 65535.0).round() as u16)
        .collect();
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(img.width() as u32, img.height() as u32, data)
            .expect("buffer matches dimensions");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| Error::Encode {
            path: path.to_path_buf(),
            source,
        })
}

/// Writes an 8-bit binary (P5) PGM.
pub fn save_gray_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    bytes.extend(to_luma8(img).into_raw());
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
