//! Follows one image through the graph stage: accepted connections, what
//! survives voting and pruning, and the resulting lattice.
//!
//! cargo run --release --example graph_cleaning

use chessgrid::synth::{render, Pose, SceneSpec};
use chessgrid::{Detector, DetectorConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pose = Pose {
        center: (160.0, 130.0),
        scale: 1.0,
        rotation: 0.7,
        tilt: (0.0008, 0.0),
    };
    let spec = SceneSpec {
        blur_sigma: 1.5,
        noise_sigma: 0.04,
        seed: 11,
        ..SceneSpec::posed(6, 7, 26.0, 320, 260, pose)
    };
    let (img, _) = render(&spec)?;

    let details = Detector::new(DetectorConfig::default())?.detect_with_details(&img)?;
    let accepted = details.edges.iter().filter(|e| e.accepted).count();
    println!("{} corner tracks", details.tracks.len());
    println!("{} pairs scored, {accepted} accepted", details.edges.len());
    println!(
        "{} connections after voting and pruning",
        details.graph.edge_count()
    );
    for g in &details.grids {
        let corners = g.corners.len();
        println!(
            "grid {}x{}: {corners} corners, {} lattice connections",
            g.rows,
            g.cols,
            g.rows * (g.cols - 1) + g.cols * (g.rows - 1)
        );
    }
    Ok(())
}
