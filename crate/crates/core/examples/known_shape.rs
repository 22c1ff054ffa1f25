//! Uses prior knowledge of the board: a known shape keeps only matching
//! grids, reported in exactly that orientation, and a config file carries
//! the setting.
//!
//! cargo run --release --example known_shape

use chessgrid::grid::BoardShape;
use chessgrid::synth::{render, Pose, SceneSpec};
use chessgrid::{Detector, DetectorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pose = Pose {
        center: (200.0, 160.0),
        scale: 1.0,
        rotation: 1.2,
        tilt: (0.0, 0.0005),
    };
    let (img, _) = render(&SceneSpec::posed(6, 8, 30.0, 400, 320, pose))?;

    for shape in [None, Some("7x5"), Some("5x7"), Some("4x4")] {
        let mut cfg = DetectorConfig::default();
        cfg.grid.known_shape = shape.map(str::parse::<BoardShape>).transpose()?;
        cfg.grid.expect_single = true;
        let grids = Detector::new(cfg)?.detect(&img)?;
        let found: Vec<String> = grids.iter().map(|g| g.shape().to_string()).collect();
        println!("known shape {:>4}: {found:?}", shape.unwrap_or("none"));
    }

    let mut cfg = DetectorConfig::default();
    cfg.grid.known_shape = Some(BoardShape::new(7, 5));
    let text = cfg.to_toml_string();
    let line = text
        .lines()
        .find(|l| l.starts_with("known_shape"))
        .unwrap_or_default();
    println!("config line: {line}");
    assert_eq!(DetectorConfig::from_toml_str(&text)?, cfg);
    Ok(())
}
