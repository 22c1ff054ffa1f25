//! Detects the same board under increasing Gaussian blur and reports the
//! median and worst corner error against ground truth.
//!
//! cargo run --release --example blur_sweep

use chessgrid::eval::{classify, Detection, EvalConfig, Metrics};
use chessgrid::grid::BoardShape;
use chessgrid::synth::{blur_sweep, Pose, SceneSpec};
use chessgrid::{Detector, DetectorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pose = Pose {
        center: (184.0, 136.0),
        scale: 0.8,
        rotation: 0.5,
        tilt: (0.0006, 0.0003),
    };
    let spec = SceneSpec {
        noise_sigma: 0.01,
        ..SceneSpec::posed(6, 8, 28.0, 368, 272, pose)
    };
    let (r, c) = spec.inner_shape();

    let mut cfg = DetectorConfig::default();
    cfg.grid.known_shape = Some(BoardShape::new(r, c));
    let detector = Detector::new(cfg)?;

    let sigmas = [0.0, 0.5, 1.0, 2.0, 3.0, 4.0];
    for (sigma, (img, truth)) in sigmas.iter().zip(blur_sweep(&spec, &sigmas)?) {
        let dets: Vec<Detection> = detector.detect(&img)?.iter().map(Detection::from).collect();
        let m = Metrics::from_outcomes(&[classify(&dets, &truth, &EvalConfig::default())?], &[]);
        match (m.e50, m.e100) {
            (Some(e50), Some(e100)) => {
                println!("sigma {sigma}: E50 {e50:.3} px, E100 {e100:.3} px")
            }
            _ => println!("sigma {sigma}: not detected"),
        }
    }
    Ok(())
}
