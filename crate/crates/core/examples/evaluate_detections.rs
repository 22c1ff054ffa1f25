//! Scores detections over a small rendered dataset: one scenario of sharp
//! boards and one of blurred boards, printed as the metrics CSV.
//!
//! cargo run --release --example evaluate_detections

use std::time::Instant;

use chessgrid::eval::{classify, metrics_csv, Detection, EvalConfig, Metrics};
use chessgrid::synth::{render, Pose, SceneSpec};
use chessgrid::{Detector, DetectorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let detector = Detector::new(DetectorConfig::default())?;
    let cfg = EvalConfig::default();
    let mut rows = Vec::new();
    for (name, sigma) in [("sharp", 0.0), ("blurred", 2.5)] {
        let mut outcomes = Vec::new();
        let mut runtimes = Vec::new();
        for i in 0..5 {
            let pose = Pose {
                center: (200.0, 150.0),
                scale: 0.9 + 0.05 * i as f64,
                rotation: 0.4 * i as f64,
                tilt: (0.0004, -0.0002),
            };
            let spec = SceneSpec {
                blur_sigma: sigma,
                noise_sigma: 0.01,
                seed: i,
                ..SceneSpec::posed(5, 7, 30.0, 400, 300, pose)
            };
            let (img, truth) = render(&spec)?;
            let t = Instant::now();
            let grids = detector.detect(&img)?;
            runtimes.push(t.elapsed().as_secs_f64() * 1e3);
            let dets: Vec<Detection> = grids.iter().map(Detection::from).collect();
            outcomes.push(classify(&dets, &truth, &cfg)?);
        }
        rows.push((
            name.to_string(),
            Metrics::from_outcomes(&outcomes, &runtimes),
        ));
    }
    print!("{}", metrics_csv(&rows));
    Ok(())
}
