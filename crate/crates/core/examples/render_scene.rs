//! Renders a tilted board with blur and noise, then writes a 16-bit PNG and
//! its ground truth.
//!
//! cargo run --example render_scene -- [out_dir]

use chessgrid::img::save_gray_png16;
use chessgrid::synth::{render, Pose, SceneSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("chessgrid-examples"));
    std::fs::create_dir_all(&out)?;

    let pose = Pose {
        center: (320.0, 240.0),
        scale: 1.1,
        rotation: 0.4,
        tilt: (0.0005, -0.0003),
    };
    let spec = SceneSpec {
        blur_sigma: 1.0,
        noise_sigma: 0.01,
        seed: 7,
        ..SceneSpec::posed(7, 10, 36.0, 640, 480, pose)
    };
    let (img, truth) = render(&spec)?;

    let png = out.join("scene.png");
    save_gray_png16(&img, &png)?;
    std::fs::write(
        out.join("scene.json"),
        serde_json::to_string_pretty(&truth)?,
    )?;
    println!(
        "{} ({}x{} inner corners)",
        png.display(),
        truth.shape[0],
        truth.shape[1]
    );
    println!(
        "first corner at ({:.3}, {:.3})",
        truth.corners[0][0], truth.corners[0][1]
    );
    Ok(())
}
