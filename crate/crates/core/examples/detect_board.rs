//! Detects chessboards in an image file, or in a rendered scene when no path
//! is given, and prints each grid's shape and a few corners.
//!
//! cargo run --release --example detect_board -- [image.png]

use std::time::Instant;

use chessgrid::img::load_gray;
use chessgrid::synth::{render, Pose, SceneSpec};
use chessgrid::{Detector, DetectorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let img = match std::env::args().nth(1) {
        Some(path) => load_gray(path)?,
        None => {
            let pose = Pose {
                center: (320.0, 240.0),
                scale: 1.0,
                rotation: -0.3,
                tilt: (0.0004, 0.0002),
            };
            render(&SceneSpec {
                blur_sigma: 0.8,
                noise_sigma: 0.01,
                ..SceneSpec::posed(6, 8, 40.0, 640, 480, pose)
            })?
            .0
        }
    };

    let detector = Detector::new(DetectorConfig::default())?;
    let t = Instant::now();
    let grids = detector.detect(&img)?;
    println!(
        "{} grid(s) in {:.1} ms",
        grids.len(),
        t.elapsed().as_secs_f64() * 1e3
    );
    for g in &grids {
        println!(
            "{}x{} corners, hull area {:.0} px^2",
            g.rows,
            g.cols,
            g.hull_area()
        );
        for c in g.corners.iter().take(3) {
            println!(
                "  ({:8.3}, {:8.3}) level {} contrast {:.3}",
                c.x, c.y, c.selected_level, c.contrast
            );
        }
    }
    Ok(())
}
