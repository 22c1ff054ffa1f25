//! Synthetic chessboard scenes with exact ground truth.

use nalgebra::Matrix3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::img::GrayImage;

/// Everything needed to render one scene.
///
/// A board point `b` (pixels in the board plane, squares spanning
/// `[0, cols*size] x [0, rows*size]`) appears in the image at
/// `homography * (b + origin)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneSpec {
    pub squares_rows: usize,
    pub squares_cols: usize,
    pub square_size: f64,
    pub origin: [f64; 2],
    /// Row-major.
    pub homography: [[f64; 3]; 3],
    pub blur_sigma: f64,
    pub noise_sigma: f64,
    /// Intensity of the dark squares; square (0, 0) is dark.
    pub fg: f32,
    /// Intensity of the light squares and the background.
    pub bg: f32,
    pub width: usize,
    pub height: usize,
    pub supersample: usize,
    pub seed: u64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            squares_rows: 5,
            squares_cols: 6,
            square_size: 20.0,
            origin: [40.0, 40.0],
            homography: IDENTITY,
            blur_sigma: 0.0,
            noise_sigma: 0.0,
            fg: 0.1,
            bg: 0.9,
            width: 200,
            height: 180,
            supersample: 4,
            seed: 0,
        }
    }
}

const IDENTITY: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// A camera view of the board, turned into a homography by [`Pose::homography`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    /// Image position of the board center.
    pub center: (f64, f64),
    /// Image pixels per board pixel at the board center.
    pub scale: f64,
    /// In-plane rotation, radians.
    pub rotation: f64,
    /// Perspective terms, per board pixel.
    pub tilt: (f64, f64),
}

impl Pose {
    pub fn homography(&self, board_w: f64, board_h: f64) -> [[f64; 3]; 3] {
        let to_center = Matrix3::new(
            1.0,
            0.0,
            -board_w / 2.0,
            0.0,
            1.0,
            -board_h / 2.0,
            0.0,
            0.0,
            1.0,
        );
        let tilt = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, self.tilt.0, self.tilt.1, 1.0);
        let (s, c) = self.rotation.sin_cos();
        let rs = Matrix3::new(
            c * self.scale,
            -s * self.scale,
            0.0,
            s * self.scale,
            c * self.scale,
            0.0,
            0.0,
            0.0,
            1.0,
        );
        let place = Matrix3::new(
            1.0,
            0.0,
            self.center.0,
            0.0,
            1.0,
            self.center.1,
            0.0,
            0.0,
            1.0,
        );
        to_array(&(place * rs * tilt * to_center))
    }
}

fn to_matrix(h: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|r, c| h[r][c])
}

fn to_array(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = m[(r, c)];
        }
    }
    out
}

/// Projective map of a point; `None` at or behind the horizon.
pub fn project(h: &[[f64; 3]; 3], x: f64, y: f64) -> Option<(f64, f64)> {
    let w = h[2][0] * x + h[2][1] * y + h[2][2];
    if w <= 1e-12 {
        return None;
    }
    Some((
        (h[0][0] * x + h[0][1] * y + h[0][2]) / w,
        (h[1][0] * x + h[1][1] * y + h[1][2]) / w,
    ))
}

impl SceneSpec {
    /// A scene whose board is placed by `pose`, with the board center at the
    /// pose center.
    pub fn posed(
        squares_rows: usize,
        squares_cols: usize,
        square_size: f64,
        width: usize,
        height: usize,
        pose: Pose,
    ) -> Self {
        let (bw, bh) = (
            squares_cols as f64 * square_size,
            squares_rows as f64 * square_size,
        );
        Self {
            squares_rows,
            squares_cols,
            square_size,
            origin: [0.0, 0.0],
            homography: pose.homography(bw, bh),
            width,
            height,
            ..Self::default()
        }
    }

    /// Inner corner counts.
    pub fn inner_shape(&self) -> (usize, usize) {
        (
            self.squares_rows.saturating_sub(1),
            self.squares_cols.saturating_sub(1),
        )
    }

    /// Board-to-image map including the origin shift.
    pub fn board_to_image(&self) -> [[f64; 3]; 3] {
        let shift = Matrix3::new(
            1.0,
            0.0,
            self.origin[0],
            0.0,
            1.0,
            self.origin[1],
            0.0,
            0.0,
            1.0,
        );
        to_array(&(to_matrix(&self.homography) * shift))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScene(m));
        if self.squares_rows < 2 || self.squares_cols < 2 {
            return bad("board needs at least 2x2 squares".into());
        }
        if !(self.square_size > 0.0) {
            return bad("square_size must be positive".into());
        }
        if self.fg == self.bg || !(0.0..=1.0).contains(&self.fg) || !(0.0..=1.0).contains(&self.bg)
        {
            return bad("fg and bg must differ and lie in [0, 1]".into());
        }
        if self.supersample == 0 {
            return bad("supersample must be at least 1".into());
        }
        if self.width == 0 || self.height == 0 {
            return bad("image size must be positive".into());
        }
        if !(self.blur_sigma >= 0.0) || !(self.noise_sigma >= 0.0) {
            return bad("blur_sigma and noise_sigma must be nonnegative".into());
        }
        let h = to_matrix(&self.homography);
        if !h.iter().all(|v| v.is_finite()) || h.determinant().abs() < 1e-12 {
            return bad("homography is singular".into());
        }
        let m = self.board_to_image();
        let (bw, bh) = (
            self.squares_cols as f64 * self.square_size,
            self.squares_rows as f64 * self.square_size,
        );
        for (u, v) in [(0.0, 0.0), (bw, 0.0), (0.0, bh), (bw, bh)] {
            match project(&m, u, v) {
                Some((x, y))
                    if x >= -0.5
                        && y >= -0.5
                        && x <= self.width as f64 - 0.5
                        && y <= self.height as f64 - 0.5 => {}
                _ => return bad("board is not fully inside the image".into()),
            }
        }
        Ok(())
    }
}

/// Exact inner-corner locations of a rendered board.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Inner corners as `[rows, cols]`.
    pub shape: [usize; 2],
    /// Row-major, `[x, y]` in image pixels.
    pub corners: Vec<[f64; 2]>,
}

impl GroundTruth {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.corners.iter().map(|c| (c[0], c[1])).collect()
    }
}

/// Corner `(i, j)` sits at board point `((j + 1) * size, (i + 1) * size)`.
pub fn ground_truth(spec: &SceneSpec) -> Result<GroundTruth> {
    spec.validate()?;
    let m = spec.board_to_image();
    let (rows, cols) = spec.inner_shape();
    let mut corners = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let (u, v) = (
                (j + 1) as f64 * spec.square_size,
                (i + 1) as f64 * spec.square_size,
            );
            let (x, y) = project(&m, u, v).expect("validated board lies in front of the camera");
            corners.push([x, y]);
        }
    }
    Ok(GroundTruth {
        shape: [rows, cols],
        corners,
    })
}

/// Renders the board without blur or noise.
fn render_coverage(spec: &SceneSpec) -> GrayImage {
    let inv = to_array(
        &to_matrix(&spec.board_to_image())
            .try_inverse()
            .expect("validated homography"),
    );
    let size = spec.square_size;
    let (rows, cols) = (spec.squares_rows as i64, spec.squares_cols as i64);
    let cell = |x: f64, y: f64| -> Option<(i64, i64)> {
        project(&inv, x, y).map(|(u, v)| ((u / size).floor() as i64, (v / size).floor() as i64))
    };
    let value = |c: Option<(i64, i64)>| -> f32 {
        match c {
            Some((cu, cv))
                if cu >= 0 && cv >= 0 && cu < cols && cv < rows && (cu + cv) % 2 == 0 =>
            {
                spec.fg
            }
            _ => spec.bg,
        }
    };
    let s = spec.supersample;
    let (w, h) = (spec.width, spec.height);
    // cells at pixel corners, (w + 1) x (h + 1)
    let corners: Vec<Option<(i64, i64)>> = (0..=h)
        .flat_map(|y| (0..=w).map(move |x| (x, y)))
        .map(|(x, y)| cell(x as f64 - 0.5, y as f64 - 0.5))
        .collect();
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let c = [
                corners[y * (w + 1) + x],
                corners[y * (w + 1) + x + 1],
                corners[(y + 1) * (w + 1) + x],
                corners[(y + 1) * (w + 1) + x + 1],
            ];
            // a pixel whose corners share one cell lies inside that convex cell
            if c[0].is_some() && c.iter().all(|&k| k == c[0]) {
                data.push(value(c[0]));
                continue;
            }
            let mut sum = 0.0f64;
            for sy in 0..s {
                for sx in 0..s {
                    let px = x as f64 - 0.5 + (sx as f64 + 0.5) / s as f64;
                    let py = y as f64 - 0.5 + (sy as f64 + 0.5) / s as f64;
                    sum += value(cell(px, py)) as f64;
                }
            }
            data.push((sum / (s * s) as f64) as f32);
        }
    }
    GrayImage::from_vec(w, h, data).expect("size matches")
}

/// Separable Gaussian blur with kernel radius `ceil(3 sigma)` and replicated
/// borders. `sigma <= 0` returns a copy.
pub fn gaussian_blur(img: &GrayImage, sigma: f64) -> GrayImage {
    if sigma <= 0.0 {
        return img.clone();
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= total);
    let (w, h) = (img.width(), img.height());
    let horizontal = GrayImage::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for (k, &wt) in kernel.iter().enumerate() {
            acc += wt * img.get_clamped(x as isize + k as isize - radius, y as isize) as f64;
        }
        acc as f32
    });
    GrayImage::from_fn(w, h, |x, y| {
        let mut acc = 0.0;
        for (k, &wt) in kernel.iter().enumerate() {
            acc += wt * horizontal.get_clamped(x as isize, y as isize + k as isize - radius) as f64;
        }
        acc as f32
    })
}

/// Renders a scene and its ground truth.
pub fn render(spec: &SceneSpec) -> Result<(GrayImage, GroundTruth)> {
    let truth = ground_truth(spec)?;
    let mut img = gaussian_blur(&render_coverage(spec), spec.blur_sigma);
    if spec.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let normal =
            Normal::new(0.0, spec.noise_sigma).map_err(|e| Error::InvalidScene(e.to_string()))?;
        for v in img.data_mut() {
            *v += normal.sample(&mut rng) as f32;
        }
    }
    for v in img.data_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    Ok((img, truth))
}

/// One rendered scene per blur sigma, sharing geometry and seed.
pub fn blur_sweep(spec: &SceneSpec, sigmas: &[f64]) -> Result<Vec<(GrayImage, GroundTruth)>> {
    sigmas
        .iter()
        .map(|&s| {
            render(&SceneSpec {
                blur_sigma: s,
                ..spec.clone()
            })
        })
        .collect()
}
