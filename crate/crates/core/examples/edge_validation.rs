//! Scores corner pairs on a rendered board: a true edge, the same-color
//! diagonal across one square, and the true edge with a quarter of its
//! sample positions flipped to the opposite polarity.
//!
//! cargo run --release --example edge_validation

use chessgrid::connect::{edge_samples, score_samples, EdgeConfig, Endpoint};
use chessgrid::img::gaussian_blur_3x3;
use chessgrid::synth::{render, Pose, SceneSpec};
use chessgrid::xcorner::{spoke_orientation, SpokeConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pose = Pose {
        center: (150.0, 120.0),
        scale: 1.0,
        rotation: 0.3,
        tilt: (0.0, 0.0),
    };
    let (img, truth) = render(&SceneSpec {
        blur_sigma: 1.0,
        ..SceneSpec::posed(5, 6, 32.0, 300, 240, pose)
    })?;
    let blurred = gaussian_blur_3x3(&img);
    let cols = truth.shape[1];
    let endpoint = |r: usize, c: usize| {
        let [x, y] = truth.corners[r * cols + c];
        let contrast = spoke_orientation(&blurred, x, y, &SpokeConfig::default()).contrast;
        Endpoint {
            x,
            y,
            level: 0,
            contrast,
        }
    };

    let cfg = EdgeConfig::default();
    let score = |a: &Endpoint, b: &Endpoint, flip: &[usize]| {
        let mut s = edge_samples(&blurred, a, b, &cfg).expect("corners far enough apart");
        for &k in flip {
            s[k] = (s[k].1, s[k].0);
        }
        score_samples(&s, a.contrast + b.contrast, cfg.keep_fraction)
    };

    let (a, b, d) = (endpoint(1, 1), endpoint(1, 2), endpoint(2, 2));
    println!("threshold        {:.3}", cfg.edge_threshold);
    println!("true edge        {:.3}", score(&a, &b, &[]));
    println!("diagonal         {:.3}", score(&a, &d, &[]));
    println!("edge, 2 flipped  {:.3}", score(&a, &b, &[1, 4]));
    Ok(())
}
