//! Shows how blur moves corners up the pyramid: level sizes, then the
//! histogram of selected levels for a sharp and a heavily blurred render.
//!
//! cargo run --release --example pyramid_levels

use chessgrid::img::build_pyramid;
use chessgrid::synth::{render, Pose, SceneSpec};
use chessgrid::{Detector, DetectorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pose = Pose {
        center: (400.0, 300.0),
        scale: 1.0,
        rotation: 0.2,
        tilt: (0.0, 0.0),
    };
    let base = SceneSpec::posed(6, 8, 60.0, 800, 600, pose);
    let cfg = DetectorConfig::default();

    let (sharp, _) = render(&base)?;
    let pyramid = build_pyramid(&sharp, cfg.pyramid.min_dimension)?;
    for (k, level) in pyramid.levels().iter().enumerate() {
        println!("level {k}: {}x{}", level.width(), level.height());
    }

    let detector = Detector::new(cfg)?;
    for sigma in [0.0, 6.0] {
        let (img, _) = render(&SceneSpec {
            blur_sigma: sigma,
            ..base.clone()
        })?;
        let details = detector.detect_with_details(&img)?;
        let mut hist = vec![0; details.pyramid_levels];
        for g in &details.grids {
            for c in &g.corners {
                hist[c.selected_level] += 1;
            }
        }
        println!("blur {sigma}: grid corners per selected level {hist:?}");
    }
    Ok(())
}
