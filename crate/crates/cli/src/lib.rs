//! `arprint` command-line tool.
//!
//! Exit codes: 0 success, 1 domain failure (defects found, no marker
//! detected), 2 usage, parse or I/O error. Everything printed under `--json`
//! has sorted keys and no timestamps.

mod args;
mod files;
mod script;

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

use arprint::analysis::analyze_with;
use arprint::render::{brightness_ramp, composite_overlay, rasterize, synthesize_marker_frame};
use arprint::session::{base_transform, replay, ScaleMode, SessionConfig};
use arprint::vision::{detect_marker, reference_marker_image, reference_pattern, train_pattern, DetectorConfig, Pose};
use arprint::{Detection, Report};

pub use args::{Cli, Command, DetectorArgs, ScaleModeArg};
pub use files::{load_catalog, parse_intrinsics};
pub use script::parse_script;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Parses `argv` (program name first) and runs the command.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_ERROR
                }
            };
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Inspect { model, json, weld_eps, area_eps } => inspect(&model, json, weld_eps, area_eps, out),
        Command::Train { image, out: path, grid, border } => train(&image, &path, grid, border, out),
        Command::Detect { frame, detector, json } => detect(&frame, &detector, json, out),
        Command::Overlay { frame, model, detector, scale_mode, target_extent, wireframe, out: path } => {
            let config = OverlayConfig { scale_mode, target_extent, wireframe };
            overlay(&frame, &model, &detector, &config, &path, out)
        }
        Command::Replay { script, catalog, scale_mode, rotation_step_deg, zoom_step, target_extent, marker_side } => {
            let config = SessionConfig {
                rotation_step: rotation_step_deg.to_radians(),
                zoom_step,
                target_extent,
                scale_mode: scale_mode.into(),
                marker_side,
                ..SessionConfig::default()
            };
            replay_cmd(&script, catalog.as_deref(), config, out, err)
        }
        Command::Marker { out: path, pattern_out, size } => marker(&path, pattern_out.as_deref(), size, out),
        Command::Synth(s) => synth(&s, out),
    }
}

impl From<ScaleModeArg> for ScaleMode {
    fn from(m: ScaleModeArg) -> Self {
        match m {
            ScaleModeArg::Fit => ScaleMode::FitToTarget,
            ScaleModeArg::True => ScaleMode::TrueSize,
        }
    }
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn inspect(model: &Path, json: bool, weld_eps: f64, area_eps: f64, out: &mut dyn Write) -> Result<i32> {
    if !(area_eps >= 0.0 && area_eps.is_finite()) {
        bail!("--area-eps must be a non-negative number, got {area_eps}");
    }
    let soup = files::load_soup(model)?;
    let mesh = files::weld(&soup, weld_eps)?;
    let report = analyze_with(&mesh, &soup, area_eps);
    if json {
        print_json(out, &report.to_json())?;
    } else {
        write_report(out, &report)?;
    }
    Ok(if report.passes() { EXIT_OK } else { EXIT_FAILURE })
}

fn write_report(out: &mut dyn Write, r: &Report) -> Result<()> {
    writeln!(out, "single watertight shell: {}", r.passes())?;
    writeln!(out, "watertight: {}", r.watertight)?;
    writeln!(out, "vertices: {}", r.vertex_count)?;
    writeln!(out, "faces: {}", r.face_count)?;
    writeln!(out, "components: {}", r.component_count)?;
    writeln!(out, "boundary edges: {} in {} loop(s)", r.boundary_edge_count, r.boundary_loops.len())?;
    writeln!(out, "non-manifold edges: {}", r.nonmanifold_edge_count)?;
    writeln!(out, "misoriented edges: {}", r.misoriented_edge_count)?;
    writeln!(out, "degenerate faces: {}", r.degenerate_face_indices.len())?;
    writeln!(out, "volume: {:.3} mm^3", r.signed_volume)?;
    if r.orientation_inverted {
        writeln!(out, "orientation: inverted (normals point inward)")?;
    }
    if let Some(b) = &r.bbox {
        let e = b.extent();
        writeln!(out, "size: {:.3} x {:.3} x {:.3} mm", e.x, e.y, e.z)?;
    }
    if let Some(s) = r.min_component_separation {
        writeln!(out, "closest shells: gap {:.3} / {:.3} / {:.3} mm along x / y / z", s[0], s[1], s[2])?;
    }
    if r.normals_absent {
        writeln!(out, "stored normals: absent")?;
    } else {
        writeln!(out, "stored normals: max deviation {:.2} deg", r.max_normal_deviation_deg)?;
    }
    Ok(())
}

fn train(image: &Path, path: &Path, grid: usize, border: f64, out: &mut dyn Write) -> Result<i32> {
    let frame = files::load_frame(image)?;
    let pattern = train_pattern(&frame, grid, border)?;
    files::write(path, pattern.to_arpat().as_bytes())?;
    writeln!(out, "wrote {}x{} pattern to {}", pattern.n(), pattern.n(), path.display())?;
    Ok(EXIT_OK)
}

fn detector_config(d: &DetectorArgs) -> Result<DetectorConfig> {
    if !(d.marker_side > 0.0 && d.marker_side.is_finite()) {
        bail!("--marker-side must be a positive length in mm");
    }
    if !(0.0..=1.0).contains(&d.match_threshold) {
        bail!("--match-threshold must lie in [0, 1]");
    }
    Ok(DetectorConfig { window: d.window, offset: d.offset, min_area: d.min_area, match_threshold: d.match_threshold })
}

/// Loads the detector inputs and looks for the marker.
fn find_marker(frame: &arprint::image::Frame, d: &DetectorArgs) -> Result<Option<Detection>> {
    let config = detector_config(d)?;
    let pattern = files::load_pattern(&d.pattern)?;
    let k = files::load_intrinsics(&d.camera)?;
    Ok(detect_marker(frame, &pattern, &k, d.marker_side, &config)?)
}

pub fn detection_json(d: &Detection) -> Value {
    json!({
        "detected": true,
        "confidence": d.confidence,
        "rotation_index": d.rotation_index,
        "corners": d.corners.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
        // + 0.0 turns -0.0 into 0.0
        "yaw": d.yaw + 0.0,
        "yaw_deg": d.yaw.to_degrees() + 0.0,
        "reprojection_rms": d.reprojection_rms,
        "pose": {
            "rotation": d.pose.rotation.m,
            "translation": d.pose.translation.to_array(),
        },
    })
}

fn detect(frame: &Path, d: &DetectorArgs, json: bool, out: &mut dyn Write) -> Result<i32> {
    let f = files::load_frame(frame)?;
    let found = find_marker(&f, d)?;
    match (&found, json) {
        (Some(det), true) => print_json(out, &detection_json(det))?,
        (None, true) => print_json(out, &json!({"detected": false}))?,
        (Some(det), false) => {
            let t = det.pose.translation;
            writeln!(out, "detected: true")?;
            writeln!(out, "confidence: {:.4}", det.confidence)?;
            writeln!(out, "translation: {:.3} {:.3} {:.3} mm", t.x, t.y, t.z)?;
            writeln!(out, "yaw: {:.3} deg", det.yaw.to_degrees())?;
            writeln!(out, "reprojection rms: {:.4} px", det.reprojection_rms)?;
        }
        (None, false) => writeln!(out, "detected: false")?,
    }
    Ok(if found.is_some() { EXIT_OK } else { EXIT_FAILURE })
}

struct OverlayConfig {
    scale_mode: ScaleModeArg,
    target_extent: f64,
    wireframe: bool,
}

fn overlay(
    frame: &Path,
    model: &Path,
    d: &DetectorArgs,
    config: &OverlayConfig,
    path: &Path,
    out: &mut dyn Write,
) -> Result<i32> {
    let f = files::load_frame(frame)?;
    let mesh = files::load_mesh(model)?;
    if !(config.target_extent > 0.0 && config.target_extent.is_finite()) {
        bail!("--target-extent must be a positive length in mm");
    }
    let Some(det) = find_marker(&f, d)? else {
        files::write(path, &f.to_rgb().to_ppm())?;
        writeln!(out, "no marker found; frame copied to {}", path.display())?;
        return Ok(EXIT_FAILURE);
    };
    let session = SessionConfig {
        scale_mode: config.scale_mode.into(),
        target_extent: config.target_extent,
        marker_side: d.marker_side,
        ..SessionConfig::default()
    };
    // the detected pose already carries the marker yaw
    let placement = base_transform(&session, &mesh);
    let k = files::load_intrinsics(&d.camera)?;
    let render = rasterize(&mesh, &placement, &det.pose, &k, f.width(), f.height())?;
    let image = composite_overlay(&f, &render, config.wireframe)?;
    files::write(path, &image.to_ppm())?;
    writeln!(out, "overlay written to {} ({} model pixels)", path.display(), render.coverage())?;
    Ok(EXIT_OK)
}

fn replay_cmd(
    script: &Path,
    catalog_dir: Option<&Path>,
    config: SessionConfig<f64>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let text = String::from_utf8(files::read(script)?).context("replay script is not UTF-8")?;
    let catalog = catalog_dir.map(load_catalog).transpose()?.unwrap_or_default();
    let upload_root = match catalog_dir {
        Some(dir) => dir.to_path_buf(),
        None => match script.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => Path::new(".").to_path_buf(),
        },
    };
    let events = parse_script(&text, &upload_root)?;
    let (state, notes) = replay(config, catalog, &events)?;
    for n in &notes {
        writeln!(err, "note: ignored {} on {:?}: {}", n.event, n.screen, n.reason)?;
    }
    print_json(out, &state.to_json())?;
    Ok(EXIT_OK)
}

fn marker(path: &Path, pattern_out: Option<&Path>, size: usize, out: &mut dyn Write) -> Result<i32> {
    let pattern = reference_pattern();
    let image = reference_marker_image(&pattern, size)?;
    files::write(path, &image.to_pgm())?;
    if let Some(p) = pattern_out {
        files::write(p, pattern.to_arpat().as_bytes())?;
    }
    writeln!(out, "wrote {size}x{size} marker to {}", path.display())?;
    Ok(EXIT_OK)
}

fn synth(s: &args::SynthArgs, out: &mut dyn Write) -> Result<i32> {
    let pattern = files::load_pattern(&s.pattern)?;
    let k = files::load_intrinsics(&s.camera)?;
    if !(s.marker_side > 0.0 && s.distance > 0.0) {
        bail!("--marker-side and --distance must be positive");
    }
    let pose = Pose::facing_camera(s.tilt_deg.to_radians(), s.yaw_deg.to_radians(), s.distance);
    let mut frame = synthesize_marker_frame(&pattern, &pose, &k, s.marker_side, s.width, s.height, s.background)?;
    if s.ramp {
        frame = brightness_ramp(&frame, 60, 200);
    }
    files::write(&s.out, &frame.to_pgm())?;
    writeln!(out, "wrote {}x{} frame to {}", s.width, s.height, s.out.display())?;
    Ok(EXIT_OK)
}
