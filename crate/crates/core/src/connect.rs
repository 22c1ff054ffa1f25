//! Candidate pairs between corners and blur-aware edge validation.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::img::{GrayImage, Pyramid};
use crate::scalesel::CornerTrack;
use crate::xcorner::half_turn_distance;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeConfig {
    pub k_neighbors: usize,
    /// Allowed deviation from perpendicular orientations, radians.
    pub perp_tolerance: f64,
    /// Longitudinal sample positions per edge.
    pub samples_n: usize,
    /// Skip-zone length per unit of `2^level`, pixels.
    pub skip_scale: f64,
    /// Lateral offset as a fraction of edge length.
    pub lateral_fraction: f64,
    pub lateral_min: f64,
    pub lateral_max: f64,
    /// Share of per-position terms kept after sorting.
    pub keep_fraction: f64,
    pub edge_threshold: f64,
}

impl Default for EdgeConfig {
    fn default() -> Self {
        Self {
            k_neighbors: 8,
            perp_tolerance: 0.3,
            samples_n: 7,
            skip_scale: 2.0,
            lateral_fraction: 0.1,
            lateral_min: 1.0,
            lateral_max: 6.0,
            keep_fraction: 0.75,
            edge_threshold: 0.05,
        }
    }
}

/// The parts of a corner edge validation needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Endpoint {
    pub x: f64,
    pub y: f64,
    pub level: usize,
    pub contrast: f64,
}

impl From<&CornerTrack> for Endpoint {
    fn from(t: &CornerTrack) -> Self {
        Self {
            x: t.x,
            y: t.y,
            level: t.selected_level,
            contrast: t.contrast,
        }
    }
}

/// A scored pair of corners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeCandidate {
    /// Track indices, `a < b`.
    pub a: usize,
    pub b: usize,
    pub length: f64,
    pub score: f64,
    pub accepted: bool,
}

/// Uniform-grid index over corner locations for neighbor queries.
struct PointGrid {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl PointGrid {
    fn new(points: &[(f64, f64)]) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for &(x, y) in points {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let area = ((x1 - x0).max(1.0)) * ((y1 - y0).max(1.0));
        let cell = (2.0 * area / points.len().max(1) as f64).sqrt().max(1.0);
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, &(x, y)) in points.iter().enumerate() {
            cells
                .entry(((x / cell).floor() as i64, (y / cell).floor() as i64))
                .or_default()
                .push(i);
        }
        Self { cell, cells }
    }

    /// `k` nearest points satisfying `eligible`, ordered by distance then index.
    fn nearest(
        &self,
        points: &[(f64, f64)],
        q: usize,
        k: usize,
        eligible: impl Fn(usize) -> bool,
    ) -> Vec<usize> {
        let (qx, qy) = points[q];
        let (cx, cy) = (
            (qx / self.cell).floor() as i64,
            (qy / self.cell).floor() as i64,
        );
        let mut found: Vec<(f64, usize)> = Vec::new();
        let max_ring = self
            .cells
            .keys()
            .map(|&(x, y)| (x - cx).abs().max((y - cy).abs()))
            .max()
            .unwrap_or(0);
        for ring in 0..=max_ring {
            for gy in cy - ring..=cy + ring {
                for gx in cx - ring..=cx + ring {
                    if (gx - cx).abs() != ring && (gy - cy).abs() != ring {
                        continue;
                    }
                    let Some(ids) = self.cells.get(&(gx, gy)) else {
                        continue;
                    };
                    for &j in ids {
                        if j != q && eligible(j) {
                            let (px, py) = points[j];
                            found.push(((px - qx).hypot(py - qy), j));
                        }
                    }
                }
            }
            found.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            // points outside the searched square are at least this far away
            let covered = ring as f64 * self.cell;
            if found.len() >= k && found[k - 1].0 <= covered {
                break;
            }
        }
        found.into_iter().take(k).map(|(_, j)| j).collect()
    }
}

/// For every corner, the `k` nearest corners selected on the same or a coarser
/// level.
pub fn knn_candidates(corners: &[CornerTrack], k: usize) -> Vec<Vec<usize>> {
    if corners.is_empty() || k == 0 {
        return vec![Vec::new(); corners.len()];
    }
    let points: Vec<(f64, f64)> = corners.iter().map(|c| (c.x, c.y)).collect();
    let grid = PointGrid::new(&points);
    (0..corners.len())
        .map(|i| {
            let level = corners[i].selected_level;
            grid.nearest(&points, i, k, |j| corners[j].selected_level >= level)
        })
        .collect()
}

/// Adjacent chessboard corners have opposite polarity, so their orientations
/// differ by a quarter turn.
pub fn orientation_compatible(theta_i: f64, theta_j: f64, tolerance: f64) -> bool {
    half_turn_distance(theta_i, theta_j) >= FRAC_PI_2 - tolerance
}

/// Lateral sample pairs `(A_k, B_k)` along the segment between two corners,
/// skipping a blur-dependent zone next to each end.
///
/// Endpoints are put in a canonical order first, so swapping them yields the
/// same samples. Returns `None` when the skip zones leave no room.
pub fn edge_samples(
    img: &GrayImage,
    ci: &Endpoint,
    cj: &Endpoint,
    cfg: &EdgeConfig,
) -> Option<Vec<(f32, f32)>> {
    let (p, q) = if (ci.x, ci.y) <= (cj.x, cj.y) {
        (ci, cj)
    } else {
        (cj, ci)
    };
    let (dx, dy) = (q.x - p.x, q.y - p.y);
    let length = dx.hypot(dy);
    let skip_p = cfg.skip_scale * Pyramid::scale(p.level);
    let skip_q = cfg.skip_scale * Pyramid::scale(q.level);
    if length <= skip_p + skip_q || cfg.samples_n == 0 {
        return None;
    }
    let (ux, uy) = (dx / length, dy / length);
    let (nx, ny) = (-uy, ux);
    let lateral = (cfg.lateral_fraction * length).clamp(cfg.lateral_min, cfg.lateral_max);
    let span = length - skip_p - skip_q;
    let samples = (0..cfg.samples_n)
        .map(|k| {
            let t = skip_p + span * (k as f64 + 0.5) / cfg.samples_n as f64;
            let (sx, sy) = (p.x + ux * t, p.y + uy * t);
            let a = img.sample((sx + nx * lateral) as f32, (sy + ny * lateral) as f32);
            let b = img.sample((sx - nx * lateral) as f32, (sy - ny * lateral) as f32);
            (a, b)
        })
        .collect();
    Some(samples)
}

/// Sum of the best `keep_fraction` of the per-position terms
/// `E_perp - E_parallel`, divided by the endpoints' contrast sum.
pub fn score_samples(samples: &[(f32, f32)], contrast_sum: f64, keep_fraction: f64) -> f64 {
    let n = samples.len();
    if n == 0 || contrast_sum < 1e-6 {
        return 0.0;
    }
    let mut diffs: Vec<f64> = samples.iter().map(|&(a, b)| (a - b) as f64).collect();
    let sign = {
        let mut sorted = diffs.clone();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        if median < 0.0 {
            -1.0
        } else {
            1.0
        }
    };
    // Same-side change to the more similar consecutive position, so a single
    // outlying position only spoils its own term.
    let step = |k: usize, j: usize| -> f64 {
        let (a0, b0) = samples[k];
        let (a1, b1) = samples[j];
        ((a0 - a1).abs() + (b0 - b1).abs()) as f64
    };
    let parallel = |k: usize| -> f64 {
        let prev = (k > 0).then(|| step(k, k - 1));
        let next = (k + 1 < n).then(|| step(k, k + 1));
        match (prev, next) {
            (Some(p), Some(q)) => p.min(q),
            (Some(v), None) | (None, Some(v)) => v,
            (None, None) => 0.0,
        }
    };
    for (k, d) in diffs.iter_mut().enumerate() {
        *d = sign * *d - parallel(k);
    }
    diffs.sort_by(|a, b| b.total_cmp(a));
    let removed = ((1.0 - keep_fraction) * n as f64 - 1e-9).ceil().max(0.0) as usize;
    let kept = n.saturating_sub(removed).max(1);
    diffs[..kept].iter().sum::<f64>() / contrast_sum
}

/// Edge intensity score between two corners; 0 when the segment is too short
/// for the corners' skip zones.
pub fn edge_score(img: &GrayImage, ci: &Endpoint, cj: &Endpoint, cfg: &EdgeConfig) -> f64 {
    match edge_samples(img, ci, cj, cfg) {
        Some(s) => score_samples(&s, ci.contrast + cj.contrast, cfg.keep_fraction),
        None => 0.0,
    }
}

/// Scores a pair that already passed the neighbor and orientation gates.
pub fn validate_connection(
    img: &GrayImage,
    corners: &[CornerTrack],
    i: usize,
    j: usize,
    cfg: &EdgeConfig,
) -> EdgeCandidate {
    let (ei, ej) = (Endpoint::from(&corners[i]), Endpoint::from(&corners[j]));
    let score = edge_score(img, &ei, &ej, cfg);
    EdgeCandidate {
        a: i.min(j),
        b: i.max(j),
        length: (ei.x - ej.x).hypot(ei.y - ej.y),
        score,
        accepted: score >= cfg.edge_threshold,
    }
}

/// Runs the neighbor, orientation and edge gates over all corners.
///
/// Returns every scored pair, ordered by `(a, b)`.
pub fn find_connections(
    img: &GrayImage,
    corners: &[CornerTrack],
    cfg: &EdgeConfig,
) -> Vec<EdgeCandidate> {
    let knn = knn_candidates(corners, cfg.k_neighbors);
    let mut pairs = BTreeSet::new();
    for (i, nbrs) in knn.iter().enumerate() {
        for &j in nbrs {
            if orientation_compatible(
                corners[i].orientation,
                corners[j].orientation,
                cfg.perp_tolerance,
            ) {
                pairs.insert((i.min(j), i.max(j)));
            }
        }
    }
    pairs
        .into_iter()
        .map(|(a, b)| validate_connection(img, corners, a, b, cfg))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xcorner::CornerCandidate;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn corner(x: f64, y: f64, level: usize, orientation: f64) -> CornerTrack {
        let m = CornerCandidate {
            x: Pyramid::from_full_resolution(level, x),
            y: Pyramid::from_full_resolution(level, y),
            level,
            intensity_raw: 1.0,
            intensity_spoke: 1.0,
            orientation,
            contrast: 0.5,
        };
        CornerTrack {
            members: vec![m],
            first_level: level,
            selected_level: level,
            x,
            y,
            orientation,
            contrast: 0.5,
            intensity: 1.0,
        }
    }

    fn ep(x: f64, y: f64, contrast: f64) -> Endpoint {
        Endpoint {
            x,
            y,
            level: 0,
            contrast,
        }
    }

    /// Dark below the line y = 20 (in image coordinates), light above.
    fn horizontal_edge(dark: f32, light: f32) -> GrayImage {
        GrayImage::from_fn(60, 40, |_, y| if y < 20 { light } else { dark })
    }

    #[test]
    fn knn_collinear_and_levels() {
        let c = vec![
            corner(0.0, 0.0, 0, 0.0),
            corner(10.0, 0.0, 0, 0.0),
            corner(20.0, 0.0, 0, 0.0),
        ];
        let k = knn_candidates(&c, 2);
        assert_eq!(k[0], vec![1, 2]);
        assert_eq!(k[2], vec![1, 0]);
        let c = vec![
            corner(0.0, 0.0, 1, 0.0),
            corner(5.0, 0.0, 0, 0.0),
            corner(9.0, 0.0, 2, 0.0),
        ];
        let k = knn_candidates(&c, 5);
        assert_eq!(k[0], vec![2]);
        assert_eq!(k[1], vec![2, 0]);
        assert!(k[2].is_empty());
    }

    proptest! {
        #[test]
        fn knn_matches_exhaustive_sort(
            pts in proptest::collection::vec((0.0f64..500.0, 0.0f64..300.0, 0usize..3), 1..80),
            k in 1usize..10,
        ) {
            let c: Vec<_> = pts.iter().map(|&(x, y, l)| corner(x, y, l, 0.0)).collect();
            let got = knn_candidates(&c, k);
            for i in 0..c.len() {
                let mut all: Vec<(f64, usize)> = (0..c.len())
                    .filter(|&j| j != i && c[j].selected_level >= c[i].selected_level)
                    .map(|j| ((c[j].x - c[i].x).hypot(c[j].y - c[i].y), j))
                    .collect();
                all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                let want: Vec<usize> = all.into_iter().take(k).map(|p| p.1).collect();
                prop_assert_eq!(&got[i], &want);
            }
        }
    }

    #[test]
    fn orientation_gate_examples() {
        assert!(orientation_compatible(0.0, -FRAC_PI_2 + 0.05, 0.3));
        assert!(!orientation_compatible(0.4, 0.4, 0.3));
        assert!(!orientation_compatible(
            0.0,
            std::f64::consts::FRAC_PI_4,
            0.3
        ));
    }

    #[test]
    fn ideal_edge_scores_kept_times_difference() {
        let img = horizontal_edge(0.2, 0.8);
        let cfg = EdgeConfig::default();
        let (a, b) = (ep(5.5, 19.5, 0.5), ep(55.5, 19.5, 0.5));
        // direct sampling oracle: lateral offset 5 px is well inside both sides
        let diff = img.sample(30.0, 14.5) - img.sample(30.0, 24.5);
        assert!((diff - 0.6).abs() < 1e-6);
        let kept = 5.0;
        let l = edge_score(&img, &a, &b, &cfg);
        assert!((l - kept * diff as f64).abs() < 1e-3, "{l}");
    }

    #[test]
    fn uniform_region_scores_zero() {
        let img = GrayImage::filled(60, 40, 0.5);
        let cfg = EdgeConfig::default();
        let l = edge_score(&img, &ep(5.0, 20.0, 0.5), &ep(55.0, 20.0, 0.5), &cfg);
        assert!(l.abs() < 1e-9);
        assert!(l < cfg.edge_threshold);
    }

    #[test]
    fn overlapping_skip_zones_reject() {
        let img = horizontal_edge(0.2, 0.8);
        let cfg = EdgeConfig::default();
        let a = Endpoint {
            level: 2,
            ..ep(10.0, 19.5, 0.5)
        };
        let b = ep(20.0, 19.5, 0.5);
        assert_eq!(edge_score(&img, &a, &b, &cfg), 0.0);
        assert!(edge_samples(&img, &a, &b, &cfg).is_none());
    }

    #[test]
    fn zero_contrast_rejects() {
        let img = horizontal_edge(0.2, 0.8);
        let l = edge_score(
            &img,
            &ep(5.5, 19.5, 0.0),
            &ep(55.5, 19.5, 0.0),
            &EdgeConfig::default(),
        );
        assert_eq!(l, 0.0);
    }

    #[test]
    fn symmetric_and_lighting_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let img = GrayImage::from_fn(80, 80, |x, y| {
            let v = ((x as f32 * 0.31).sin() + (y as f32 * 0.17).cos()) * 0.2 + 0.5;
            v.clamp(0.0, 1.0)
        });
        let moved = img.map_affine(0.5, 0.25);
        let cfg = EdgeConfig::default();
        for _ in 0..200 {
            let a = Endpoint {
                level: rng.random_range(0..2),
                ..ep(
                    rng.random_range(5.0..75.0),
                    rng.random_range(5.0..75.0),
                    rng.random_range(0.1..1.0),
                )
            };
            let b = Endpoint {
                level: rng.random_range(0..2),
                ..ep(
                    rng.random_range(5.0..75.0),
                    rng.random_range(5.0..75.0),
                    rng.random_range(0.1..1.0),
                )
            };
            let l = edge_score(&img, &a, &b, &cfg);
            assert_eq!(l, edge_score(&img, &b, &a, &cfg));
            let scaled_a = Endpoint {
                contrast: a.contrast * 0.5,
                ..a
            };
            let scaled_b = Endpoint {
                contrast: b.contrast * 0.5,
                ..b
            };
            let m = edge_score(&moved, &scaled_a, &scaled_b, &cfg);
            assert!((l - m).abs() <= 1e-5 * l.abs().max(1.0), "{l} {m}");
        }
    }

    #[test]
    fn keep_fraction_monotone() {
        // clean edge: every term equal, so keeping more only adds equal terms
        let clean = vec![(0.8f32, 0.2f32); 8];
        // four positive terms, so from half onwards every added term is <= 0
        let noisy = vec![
            (0.8, 0.2),
            (0.8, 0.2),
            (0.2, 0.8),
            (0.5, 0.5),
            (0.8, 0.2),
            (0.8, 0.2),
            (0.5, 0.5),
            (0.8, 0.2),
        ];
        let mut prev = f64::MAX;
        for f in [0.5, 0.625, 0.75, 0.875, 1.0] {
            let l = score_samples(&noisy, 1.0, f);
            assert!(l <= prev + 1e-12);
            prev = l;
            let c = score_samples(&clean, 1.0, f);
            let kept = (f * 8.0f64).round();
            assert!((c - kept * 0.6).abs() < 1e-6);
        }
    }

    #[test]
    fn corrupted_quarter_keeps_decision() {
        let img = horizontal_edge(0.2, 0.8);
        let cfg = EdgeConfig::default();
        let (a, b) = (ep(5.5, 19.5, 0.5), ep(55.5, 19.5, 0.5));
        let clean = edge_samples(&img, &a, &b, &cfg).unwrap();
        let n = clean.len();
        let corrupt = (0.25 * n as f64).ceil() as usize;
        // every subset of at most `corrupt` positions
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize > corrupt {
                continue;
            }
            let mut s = clean.clone();
            for (i, v) in s.iter_mut().enumerate() {
                if mask & (1 << i) != 0 {
                    *v = (v.1, v.0);
                }
            }
            let l = score_samples(&s, 1.0, cfg.keep_fraction);
            assert!(l >= cfg.edge_threshold, "{mask:b} {l}");
        }
    }
}
