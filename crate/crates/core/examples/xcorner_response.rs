//! Runs the x-corner stage on one level: ring response, suppression, the
//! filter cascade and sub-pixel refinement, with a count per rejecting stage.
//!
//! cargo run --release --example xcorner_response

use std::collections::BTreeMap;

use chessgrid::synth::{render, Pose, SceneSpec};
use chessgrid::xcorner::{
    extract_candidates, nonmax_suppress, reject_stage, LevelResponse, XCornerConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pose = Pose {
        center: (160.0, 120.0),
        scale: 1.0,
        rotation: 0.25,
        tilt: (0.0, 0.0),
    };
    let spec = SceneSpec {
        noise_sigma: 0.02,
        seed: 3,
        ..SceneSpec::posed(5, 6, 30.0, 320, 240, pose)
    };
    let (img, truth) = render(&spec)?;

    let cfg = XCornerConfig::default();
    let resp = LevelResponse::compute(&img, &cfg);
    let top = resp.filtered.max_value();
    let peaks = nonmax_suppress(&resp.filtered, cfg.nms_radius, cfg.nms_floor);

    let mut rejected = BTreeMap::new();
    for p in &peaks {
        if let Some(stage) = reject_stage(p, &resp.intensity, &resp.blurred, top, &cfg) {
            *rejected.entry(format!("{stage:?}")).or_insert(0) += 1;
        }
    }
    println!("{} peaks, rejected by stage: {rejected:?}", peaks.len());

    let corners = extract_candidates(&resp, 0, top, &cfg);
    println!(
        "{} corners kept, {} in the truth",
        corners.len(),
        truth.corners.len()
    );
    let worst = truth
        .points()
        .iter()
        .map(|t| {
            corners
                .iter()
                .map(|c| (c.x - t.0).hypot(c.y - t.1))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    println!("worst distance from a true corner to its nearest detection: {worst:.3} px");
    Ok(())
}
