//! Detection scoring: TP/FP/FN, F1, corner error and runtime quantiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BoardShape, ChessboardGrid};
use crate::synth::GroundTruth;

/// Default corner distance threshold, pixels.
pub const DEFAULT_TC: f64 = 5.0;

/// A detected grid reduced to what scoring needs.
#[derive(Clone, Debug, PartialEq)]
pub struct Detection {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub corners: Vec<(f64, f64)>,
}

impl From<&ChessboardGrid> for Detection {
    fn from(g: &ChessboardGrid) -> Self {
        Self {
            rows: g.rows,
            cols: g.cols,
            corners: g.points(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub tc: f64,
    /// Add (0.5, 0.5) to ground truth labeled with pixel (0, 0) covering
    /// `(0, 1]` instead of `[-0.5, 0.5]`.
    pub half_pixel_offset: bool,
    /// Match corners by grid position under the best lattice symmetry instead
    /// of nearest ground-truth corner.
    pub strict: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            tc: DEFAULT_TC,
            half_pixel_offset: false,
            strict: false,
        }
    }
}

/// Classification of all detections in one image.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ImageOutcome {
    pub tp: usize,
    pub fp: usize,
    /// 1 when the image has neither a TP nor an FP.
    pub fn_: usize,
    /// Per-corner errors of the TP detections.
    pub errors: Vec<f64>,
}

fn nearest_errors(det: &Detection, truth: &[(f64, f64)]) -> Vec<f64> {
    det.corners
        .iter()
        .map(|&(x, y)| {
            truth
                .iter()
                .map(|&(tx, ty)| (x - tx).hypot(y - ty))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Errors by grid position, under whichever of the lattice symmetries fits best.
fn ordered_errors(det: &Detection, truth: &[(f64, f64)], rows: usize, cols: usize) -> Vec<f64> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for transpose in [false, true] {
        let (r, c) = if transpose {
            (cols, rows)
        } else {
            (rows, cols)
        };
        if (r, c) != (det.rows, det.cols) {
            continue;
        }
        for flip_r in [false, true] {
            for flip_c in [false, true] {
                let errs: Vec<f64> = (0..r * c)
                    .map(|i| {
                        let (mut a, mut b) = (i / c, i % c);
                        if flip_r {
                            a = r - 1 - a;
                        }
                        if flip_c {
                            b = c - 1 - b;
                        }
                        let t = if transpose {
                            truth[b * cols + a]
                        } else {
                            truth[a * cols + b]
                        };
                        let d = det.corners[i];
                        (d.0 - t.0).hypot(d.1 - t.1)
                    })
                    .collect();
                let worst = errs.iter().cloned().fold(0.0, f64::max);
                if best.as_ref().is_none_or(|b| worst < b.0) {
                    best = Some((worst, errs));
                }
            }
        }
    }
    best.map(|b| b.1).unwrap_or_default()
}

/// Scores one image's detections against its ground truth.
///
/// Only detections with the expected shape (either way round) count: TP when
/// every corner is within `tc` of the truth, FP otherwise.
pub fn classify(
    detections: &[Detection],
    truth: &GroundTruth,
    cfg: &EvalConfig,
) -> Result<ImageOutcome> {
    if truth.corners.is_empty() {
        return Err(Error::InvalidTruth("ground truth has no corners".into()));
    }
    let [rows, cols] = truth.shape;
    if rows * cols != truth.corners.len() {
        return Err(Error::InvalidTruth(format!(
            "shape {rows}x{cols} does not match {} corners",
            truth.corners.len()
        )));
    }
    let offset = if cfg.half_pixel_offset { 0.5 } else { 0.0 };
    let points: Vec<(f64, f64)> = truth
        .corners
        .iter()
        .map(|c| (c[0] + offset, c[1] + offset))
        .collect();
    let shape = BoardShape::new(rows, cols);
    let mut out = ImageOutcome::default();
    for det in detections {
        if !BoardShape::new(det.rows, det.cols).matches(shape)
            || det.corners.len() != det.rows * det.cols
        {
            continue;
        }
        let errors = if cfg.strict {
            ordered_errors(det, &points, rows, cols)
        } else {
            nearest_errors(det, &points)
        };
        if errors.iter().all(|&e| e <= cfg.tc) {
            out.tp += 1;
            out.errors.extend(errors);
        } else {
            out.fp += 1;
        }
    }
    if out.tp == 0 && out.fp == 0 {
        out.fn_ = 1;
    }
    Ok(out)
}

pub fn f1(tp: usize, fp: usize, fn_: usize) -> f64 {
    let denom = 2 * tp + fp + fn_;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// Lower median and maximum; `None` for an empty list.
pub fn quantiles(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some((v[(v.len() - 1) / 2], v[v.len() - 1]))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n_images: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub f1: f64,
    pub e50: Option<f64>,
    pub e100: Option<f64>,
    /// Milliseconds.
    pub r50: Option<f64>,
    pub r100: Option<f64>,
}

impl Metrics {
    /// Pools image outcomes; corner errors are pooled over all TP corners.
    pub fn from_outcomes(outcomes: &[ImageOutcome], runtimes_ms: &[f64]) -> Self {
        let tp = outcomes.iter().map(|o| o.tp).sum();
        let fp = outcomes.iter().map(|o| o.fp).sum();
        let fn_ = outcomes.iter().map(|o| o.fn_).sum();
        let errors: Vec<f64> = outcomes
            .iter()
            .flat_map(|o| o.errors.iter().copied())
            .collect();
        let e = quantiles(&errors);
        let r = quantiles(runtimes_ms);
        Self {
            n_images: outcomes.len(),
            tp,
            fp,
            fn_,
            f1: f1(tp, fp, fn_),
            e50: e.map(|q| q.0),
            e100: e.map(|q| q.1),
            r50: r.map(|q| q.0),
            r100: r.map(|q| q.1),
        }
    }
}

/// CSV with one row per scenario.
pub fn metrics_csv(rows: &[(String, Metrics)]) -> String {
    let opt = |v: Option<f64>| v.map(|v| format!("{v:.4}")).unwrap_or_default();
    let mut out = String::from("scenario,N,TP,FP,FN,F1,E50,E100,R50,R100\n");
    for (name, m) in rows {
        out.push_str(&format!(
            "{name},{},{},{},{},{:.4},{},{},{},{}\n",
            m.n_images,
            m.tp,
            m.fp,
            m.fn_,
            m.f1,
            opt(m.e50),
            opt(m.e100),
            opt(m.r50),
            opt(m.r100)
        ));
    }
    out
}
