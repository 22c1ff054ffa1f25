//! Cross-level association of x-corners and choice of the level each corner is
//! localized at.

use serde::{Deserialize, Serialize};

use crate::img::Pyramid;
use crate::xcorner::CornerCandidate;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScaleConfig {
    /// Match distance in units of the candidate level's pixel size.
    pub match_radius: f64,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self { match_radius: 1.5 }
    }
}

/// One physical corner seen on one or more pyramid levels.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerTrack {
    /// Members ordered by level, at most one per level.
    pub members: Vec<CornerCandidate>,
    /// Lowest level the corner was observed on; grows with local blur.
    pub first_level: usize,
    pub selected_level: usize,
    /// Full-resolution location taken from the selected level.
    pub x: f64,
    pub y: f64,
    pub orientation: f64,
    pub contrast: f64,
    pub intensity: f64,
}

impl CornerTrack {
    fn from_members(members: Vec<CornerCandidate>) -> Self {
        let first_level = members[0].level;
        let mut t = Self {
            members,
            first_level,
            selected_level: first_level,
            x: 0.0,
            y: 0.0,
            orientation: 0.0,
            contrast: 0.0,
            intensity: 0.0,
        };
        t.selected_level = select_level(&t);
        let m = *t
            .member(t.selected_level)
            .expect("selected level is a member");
        let (x, y) = full_resolution(&m);
        t.x = x;
        t.y = y;
        t.orientation = m.orientation;
        t.contrast = m.contrast;
        t.intensity = m.intensity_spoke;
        t
    }

    pub fn member(&self, level: usize) -> Option<&CornerCandidate> {
        self.members.iter().find(|m| m.level == level)
    }

    pub fn levels(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|m| m.level)
    }
}

/// Candidate location in full-resolution coordinates.
pub fn full_resolution(c: &CornerCandidate) -> (f64, f64) {
    (
        Pyramid::to_full_resolution(c.level, c.x),
        Pyramid::to_full_resolution(c.level, c.y),
    )
}

/// Level maximizing `intensity_spoke / (level + 1)`; ties go to the lower
/// level.
pub fn select_level(track: &CornerTrack) -> usize {
    let mut best: Option<(f64, usize)> = None;
    for m in &track.members {
        let score = m.intensity_spoke / (m.level as f64 + 1.0);
        match best {
            Some((s, l)) if score < s || (score == s && m.level >= l) => {}
            _ => best = Some((score, m.level)),
        }
    }
    best.expect("track has members").1
}

/// Greedily links candidates from level 0 upward.
///
/// A level-`k` candidate may join a track whose newest member is on a lower
/// level if its full-resolution distance to that member is at most
/// `match_radius * 2^k`. Closest pairs are linked first; every candidate
/// joins at most one track and every track takes at most one candidate per
/// level. Leftover candidates start new tracks.
pub fn associate_levels(per_level: &[Vec<CornerCandidate>], cfg: &ScaleConfig) -> Vec<CornerTrack> {
    let mut tracks: Vec<Vec<CornerCandidate>> = Vec::new();
    for (level, cands) in per_level.iter().enumerate() {
        let limit = cfg.match_radius * Pyramid::scale(level);
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        if level > 0 {
            for (ci, c) in cands.iter().enumerate() {
                let (cx, cy) = full_resolution(c);
                for (ti, t) in tracks.iter().enumerate() {
                    let head = t.last().expect("non-empty track");
                    if head.level >= level {
                        continue;
                    }
                    let (hx, hy) = full_resolution(head);
                    let d = (cx - hx).hypot(cy - hy);
                    if d <= limit {
                        pairs.push((d, ci, ti));
                    }
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut cand_used = vec![false; cands.len()];
        let mut track_used = vec![false; tracks.len()];
        for (_, ci, ti) in pairs {
            if cand_used[ci] || track_used[ti] {
                continue;
            }
            cand_used[ci] = true;
            track_used[ti] = true;
            tracks[ti].push(cands[ci]);
        }
        for (ci, c) in cands.iter().enumerate() {
            if !cand_used[ci] {
                tracks.push(vec![*c]);
            }
        }
    }
    tracks.into_iter().map(CornerTrack::from_members).collect()
}
