//! Command-line front end: `render`, `detect`, `eval` and `bench`.
//!
//! Exit codes: 0 success (also when nothing is detected), 1 usage or invalid
//! input, 2 file system or decode failure, 3 internal error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use image::{Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::detect::{Detector, DetectorConfig};
use crate::error::Error;
use crate::eval::{
    classify, metrics_csv, quantiles, Detection, EvalConfig, ImageOutcome, Metrics, DEFAULT_TC,
};
use crate::grid::{BoardShape, ChessboardGrid};
use crate::img::{load_gray, save_gray_png16, GrayImage};
use crate::synth::{blur_sweep, GroundTruth, Pose, SceneSpec};

#[derive(Parser, Debug)]
#[command(
    name = "chessgrid",
    version,
    about = "Chessboard detection, synthetic scenes and scoring"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Detect chessboards and report their corners as JSON.
    Detect(DetectArgs),
    /// Render a scene file to a 16-bit PNG and a ground-truth JSON.
    Render(RenderArgs),
    /// Score detection reports against ground truth.
    Eval(EvalArgs),
    /// Time the detector on images, excluding file IO.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct DetectorArgs {
    /// Detector configuration file (flat TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Expected inner-corner shape; other boards are dropped.
    #[arg(long, value_name = "RxC")]
    shape: Option<BoardShape>,
    /// Report at most one board.
    #[arg(long)]
    single: bool,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(required = true)]
    images: Vec<PathBuf>,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Also draw corners and connections onto the input (needs --out).
    #[arg(long)]
    overlay: bool,
    /// Directory for one `<stem>.json` per image; JSON lines on stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    scene: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    detections: PathBuf,
    truth: PathBuf,
    /// Corner distance threshold in pixels.
    #[arg(long, default_value_t = DEFAULT_TC)]
    tc: f64,
    /// Directory for metrics.json and metrics.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Image files or directories of images; the parent directory names the scenario.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    detector: DetectorArgs,
    /// Timed runs per image after one discarded warm-up.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(3..))]
    reps: u32,
    /// JSON file for the per-scenario timings.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            _ if e.is_io() => Failure::Io(msg),
            Error::InvalidConfig(_)
            | Error::ConfigSyntax(_)
            | Error::InvalidScene(_)
            | Error::InvalidTruth(_) => Failure::Usage(msg),
            _ => Failure::Internal(msg),
        }
    }
}

fn io_failure(path: &Path, e: impl fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let outcome = std::panic::catch_unwind(|| match cli.command {
        Command::Detect(a) => cmd_detect(a),
        Command::Render(a) => cmd_render(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Bench(a) => cmd_bench(a),
    });
    match outcome {
        Ok(Ok(())) => 0,
        Ok(Err(f)) => {
            eprintln!("error: {f}");
            f.code()
        }
        Err(_) => 3,
    }
}

fn build_detector(a: &DetectorArgs) -> Result<Detector, Failure> {
    let mut cfg = match &a.config {
        Some(p) => DetectorConfig::load(p)?,
        None => DetectorConfig::default(),
    };
    if a.shape.is_some() {
        cfg.grid.known_shape = a.shape;
    }
    cfg.grid.expect_single |= a.single;
    Ok(Detector::new(cfg)?)
}

/// Per-image detection report as written by `detect`.
#[derive(Debug, Default, Serialize, Deserialize)]
pub struct DetectionReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
    #[serde(default)]
    pub grids: Vec<ChessboardGrid>,
    /// Detector time only, excluding decoding and writing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn create_dir(path: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(path).map_err(|e| io_failure(path, e))
}

fn cmd_detect(a: DetectArgs) -> Result<(), Failure> {
    if a.overlay && a.out.is_none() {
        return Err(Failure::Usage("--overlay needs --out".into()));
    }
    let detector = build_detector(&a.detector)?;
    if let Some(dir) = &a.out {
        create_dir(dir)?;
    }
    let mut failed = 0;
    for path in &a.images {
        let mut report = DetectionReport::default();
        let mut loaded = None;
        match load_gray(path) {
            Ok(img) => {
                let t = Instant::now();
                match detector.detect(&img) {
                    Ok(grids) => {
                        report.runtime_ms = Some(t.elapsed().as_secs_f64() * 1e3);
                        report.grids = grids;
                        loaded = Some(img);
                    }
                    Err(e) => report.error = Some(e.to_string()),
                }
            }
            Err(e) => report.error = Some(e.to_string()),
        }
        if let Some(msg) = &report.error {
            eprintln!("error: {msg}");
            failed += 1;
        }
        match &a.out {
            Some(dir) => {
                let name = stem(path);
                let json = serde_json::to_string_pretty(&report).expect("report serializes");
                write_file(&dir.join(format!("{name}.json")), json + "\n")?;
                if let (true, Some(img)) = (a.overlay, &loaded) {
                    let target = dir.join(format!("{name}.overlay.png"));
                    draw_overlay(img, &report.grids)
                        .save(&target)
                        .map_err(|e| io_failure(&target, e))?;
                }
            }
            None => {
                report.image = Some(path.display().to_string());
                println!(
                    "{}",
                    serde_json::to_string(&report).expect("report serializes")
                );
            }
        }
    }
    if failed > 0 {
        return Err(Failure::Io(format!(
            "{failed} of {} images failed",
            a.images.len()
        )));
    }
    Ok(())
}

/// Input image in gray with connections in green, corners in red and each
/// grid's first corner in blue.
pub fn draw_overlay(img: &GrayImage, grids: &[ChessboardGrid]) -> RgbImage {
    let (w, h) = (img.width(), img.height());
    let mut out = RgbImage::from_fn(w as u32, h as u32, |x, y| {
        let v = (img.get(x as usize, y as usize).clamp(0.0, 1.0) * 255.0).round() as u8;
        Rgb([v, v, v])
    });
    let put = |out: &mut RgbImage, x: f64, y: f64, c: [u8; 3]| {
        let (px, py) = (x.round(), y.round());
        if px >= 0.0 && py >= 0.0 && (px as usize) < w && (py as usize) < h {
            out.put_pixel(px as u32, py as u32, Rgb(c));
        }
    };
    for g in grids {
        for r in 0..g.rows {
            for c in 0..g.cols {
                let p = g.corner(r, c);
                for (rr, cc) in [(r, c + 1), (r + 1, c)] {
                    if rr < g.rows && cc < g.cols {
                        let q = g.corner(rr, cc);
                        let steps = ((q.x - p.x).hypot(q.y - p.y) * 2.0).ceil().max(1.0) as usize;
                        for s in 0..=steps {
                            let t = s as f64 / steps as f64;
                            put(
                                &mut out,
                                p.x + (q.x - p.x) * t,
                                p.y + (q.y - p.y) * t,
                                [0, 200, 0],
                            );
                        }
                    }
                }
            }
        }
        for (i, p) in g.corners.iter().enumerate() {
            let (color, arm) = if i == 0 {
                ([40, 80, 255], 4)
            } else {
                ([255, 0, 0], 2)
            };
            for d in -arm..=arm {
                put(&mut out, p.x + d as f64, p.y, color);
                put(&mut out, p.x, p.y + d as f64, color);
            }
        }
    }
    out
}

/// A scene file: the [`SceneSpec`] fields, plus an optional `name`, an
/// optional `sweep` of blur sigmas and an optional `[pose]` table that
/// replaces `homography` and `origin`.
#[derive(Debug, Deserialize)]
struct PoseTable {
    center: [f64; 2],
    #[serde(default = "one")]
    scale: f64,
    #[serde(default)]
    rotation: f64,
    #[serde(default)]
    tilt: [f64; 2],
}

fn one() -> f64 {
    1.0
}

fn parse_scene(
    text: &str,
    fallback_name: &str,
) -> Result<(String, SceneSpec, Option<Vec<f64>>), Failure> {
    let bad = |m: String| Failure::Usage(format!("scene file: {m}"));
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| bad(e.to_string()))?;
    let name = match table.remove("name") {
        Some(toml::Value::String(s)) => s,
        Some(_) => return Err(bad("name must be a string".into())),
        None => fallback_name.to_string(),
    };
    let sweep: Option<Vec<f64>> = table
        .remove("sweep")
        .map(|v| v.try_into())
        .transpose()
        .map_err(|e: toml::de::Error| bad(format!("sweep: {e}")))?;
    let pose: Option<PoseTable> = table
        .remove("pose")
        .map(|v| v.try_into())
        .transpose()
        .map_err(|e: toml::de::Error| bad(format!("pose: {e}")))?;
    let known = toml::Table::try_from(SceneSpec::default()).expect("scene serializes");
    if let Some(key) = table.keys().find(|k| !known.contains_key(*k)) {
        return Err(bad(format!("unknown key {key:?}")));
    }
    let mut spec: SceneSpec = table
        .try_into()
        .map_err(|e: toml::de::Error| bad(e.to_string()))?;
    if let Some(p) = pose {
        let placed = SceneSpec::posed(
            spec.squares_rows,
            spec.squares_cols,
            spec.square_size,
            spec.width,
            spec.height,
            Pose {
                center: (p.center[0], p.center[1]),
                scale: p.scale,
                rotation: p.rotation,
                tilt: (p.tilt[0], p.tilt[1]),
            },
        );
        spec.homography = placed.homography;
        spec.origin = placed.origin;
    }
    Ok((name, spec, sweep))
}

fn cmd_render(a: RenderArgs) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&a.scene).map_err(|e| io_failure(&a.scene, e))?;
    let (name, spec, sweep) = parse_scene(&text, &stem(&a.scene))?;
    let outputs = match &sweep {
        Some(sigmas) => blur_sweep(&spec, sigmas)?
            .into_iter()
            .zip(sigmas)
            .map(|(r, s)| (format!("{name}_blur{s}"), r))
            .collect(),
        None => vec![(name, blur_sweep(&spec, &[spec.blur_sigma])?.remove(0))],
    };
    create_dir(&a.out)?;
    for (name, (img, truth)) in outputs {
        save_gray_png16(&img, a.out.join(format!("{name}.png")))?;
        let json = serde_json::to_string_pretty(&truth).expect("truth serializes");
        write_file(&a.out.join(format!("{name}.json")), json + "\n")?;
        println!("{}", a.out.join(&name).display());
    }
    Ok(())
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| io_failure(dir, e))? {
        let p = entry.map_err(|e| io_failure(dir, e))?.path();
        if p.is_file() && p.extension().is_some_and(|e| e == "json") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    serde_json::from_str(&text).map_err(|source| {
        Error::Json {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

/// Scenarios of a truth tree: JSON files directly in `root` form one scenario
/// named after `root`, each subdirectory with JSON files forms another.
fn scenarios(root: &Path) -> Result<Vec<(String, PathBuf, Vec<PathBuf>)>, Failure> {
    let mut out = Vec::new();
    let top = json_files(root)?;
    if !top.is_empty() {
        let name = root
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "all".into());
        out.push((name, PathBuf::new(), top));
    }
    let mut subdirs: Vec<PathBuf> = std::fs::read_dir(root)
        .map_err(|e| io_failure(root, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    subdirs.sort();
    for d in subdirs {
        let files = json_files(&d)?;
        if !files.is_empty() {
            let name = d
                .file_name()
                .expect("directory entry has a name")
                .to_string_lossy()
                .into_owned();
            out.push((name.clone(), PathBuf::from(name), files));
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct EvalSummary {
    tc: f64,
    scenarios: BTreeMap<String, Metrics>,
    pooled: Metrics,
}

fn cmd_eval(a: EvalArgs) -> Result<(), Failure> {
    if !(a.tc > 0.0) {
        return Err(Failure::Usage("--tc must be positive".into()));
    }
    let cfg = EvalConfig {
        tc: a.tc,
        ..EvalConfig::default()
    };
    if !a.detections.is_dir() {
        return Err(io_failure(&a.detections, "not a directory"));
    }
    let mut rows = Vec::new();
    let mut all_outcomes: Vec<ImageOutcome> = Vec::new();
    let mut all_runtimes = Vec::new();
    for (name, rel, files) in scenarios(&a.truth)? {
        let mut outcomes = Vec::new();
        let mut runtimes = Vec::new();
        for truth_path in files {
            let truth: GroundTruth = read_json(&truth_path)?;
            let det_path = a
                .detections
                .join(&rel)
                .join(truth_path.file_name().expect("file has a name"));
            let report: DetectionReport = if det_path.is_file() {
                read_json(&det_path)?
            } else {
                DetectionReport::default()
            };
            let dets: Vec<Detection> = report.grids.iter().map(Detection::from).collect();
            outcomes.push(classify(&dets, &truth, &cfg)?);
            runtimes.extend(report.runtime_ms);
        }
        rows.push((name, Metrics::from_outcomes(&outcomes, &runtimes)));
        all_outcomes.extend(outcomes);
        all_runtimes.extend(runtimes);
    }
    if rows.is_empty() {
        return Err(Failure::Usage(format!(
            "no ground-truth JSON files under {}",
            a.truth.display()
        )));
    }
    let pooled = Metrics::from_outcomes(&all_outcomes, &all_runtimes);
    let summary = EvalSummary {
        tc: a.tc,
        scenarios: rows.iter().cloned().collect(),
        pooled: pooled.clone(),
    };
    rows.push(("pooled".into(), pooled));
    let csv = metrics_csv(&rows);
    print!("{csv}");
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write_file(&dir.join("metrics.csv"), &csv)?;
        let json = serde_json::to_string_pretty(&summary).expect("metrics serialize");
        write_file(&dir.join("metrics.json"), json + "\n")?;
    }
    Ok(())
}

fn is_image(p: &Path) -> bool {
    p.extension()
        .map(|e| e.to_string_lossy().to_ascii_lowercase())
        .is_some_and(|e| matches!(e.as_str(), "png" | "pgm" | "pnm"))
}

fn scenario_of(p: &Path) -> String {
    p.parent()
        .and_then(|d| d.file_name())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| ".".into())
}

#[derive(Serialize)]
struct BenchRow {
    images: usize,
    reps: u32,
    r50_ms: f64,
    r100_ms: f64,
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    let detector = build_detector(&a.detector)?;
    let mut by_scenario: BTreeMap<String, Vec<PathBuf>> = BTreeMap::new();
    for input in &a.inputs {
        if input.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(input)
                .map_err(|e| io_failure(input, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_image(p))
                .collect();
            files.sort();
            let name = input
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| ".".into());
            by_scenario.entry(name).or_default().extend(files);
        } else {
            by_scenario
                .entry(scenario_of(input))
                .or_default()
                .push(input.clone());
        }
    }
    let mut report = BTreeMap::new();
    println!("scenario,images,reps,R50,R100");
    for (name, files) in by_scenario {
        if files.is_empty() {
            continue;
        }
        let mut timings = Vec::new();
        for f in &files {
            let img = load_gray(f)?;
            detector.detect(&img)?;
            for _ in 0..a.reps {
                let t = Instant::now();
                detector.detect(&img)?;
                timings.push(t.elapsed().as_secs_f64() * 1e3);
            }
        }
        let (r50, r100) = quantiles(&timings).expect("at least one timing");
        println!("{name},{},{},{r50:.3},{r100:.3}", files.len(), a.reps);
        report.insert(
            name,
            BenchRow {
                images: files.len(),
                reps: a.reps,
                r50_ms: r50,
                r100_ms: r100,
            },
        );
    }
    if report.is_empty() {
        return Err(Failure::Usage("no images to benchmark".into()));
    }
    if let Some(path) = &a.out {
        let json = serde_json::to_string_pretty(&report).expect("timings serialize");
        write_file(path, json + "\n")?;
    }
    Ok(())
}
