use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use arprint::analysis::DEFAULT_EPS_AREA;
use arprint::vision::{DEFAULT_BORDER_FRACTION, DEFAULT_GRID};

#[derive(Debug, Parser)]
#[command(name = "arprint", version, about = "Printability checks and marker-based AR overlays for STL models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleModeArg {
    /// Largest extent scaled to --target-extent.
    Fit,
    /// Model millimeters rendered as real millimeters.
    True,
}

#[derive(Debug, clap::Args)]
pub struct DetectorArgs {
    /// Trained pattern (ARPAT text file).
    #[arg(long)]
    pub pattern: PathBuf,
    /// Camera intrinsics JSON: {"fx", "fy", "cx", "cy"}.
    #[arg(long)]
    pub camera: PathBuf,
    /// Printed marker side in mm, border included.
    #[arg(long)]
    pub marker_side: f64,
    #[arg(long, default_value_t = 31)]
    pub window: usize,
    #[arg(long, default_value_t = 7)]
    pub offset: i32,
    #[arg(long, default_value_t = 400.0)]
    pub min_area: f64,
    #[arg(long, default_value_t = 0.75)]
    pub match_threshold: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an STL model for gaps, shells and orientation problems.
    Inspect {
        model: PathBuf,
        #[arg(long)]
        json: bool,
        /// Vertex weld tolerance in mm; 0 welds bit-identical coordinates only.
        #[arg(long, default_value_t = 1e-6)]
        weld_eps: f64,
        /// Faces below this area (mm²) count as degenerate.
        #[arg(long, default_value_t = DEFAULT_EPS_AREA)]
        area_eps: f64,
    },
    /// Learn a marker pattern from a straight-on image of the marker.
    Train {
        image: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_BORDER_FRACTION)]
        border: f64,
    },
    /// Find the marker in a PGM frame and print its pose.
    Detect {
        frame: PathBuf,
        #[command(flatten)]
        detector: DetectorArgs,
        #[arg(long)]
        json: bool,
    },
    /// Draw a model over the marker in a frame.
    Overlay {
        frame: PathBuf,
        model: PathBuf,
        #[command(flatten)]
        detector: DetectorArgs,
        #[arg(long, value_enum, default_value_t = ScaleModeArg::Fit)]
        scale_mode: ScaleModeArg,
        #[arg(long, default_value_t = 80.0)]
        target_extent: f64,
        #[arg(long)]
        wireframe: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a recorded UI event script and print the final session state.
    Replay {
        script: PathBuf,
        /// Model folder: STL files in its subfolders form the starting
        /// catalog (folder name = category); uploads are resolved against it.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ScaleModeArg::Fit)]
        scale_mode: ScaleModeArg,
        #[arg(long, default_value_t = 15.0)]
        rotation_step_deg: f64,
        #[arg(long, default_value_t = 1.25)]
        zoom_step: f64,
        #[arg(long, default_value_t = 80.0)]
        target_extent: f64,
        #[arg(long, default_value_t = 80.0)]
        marker_side: f64,
    },
    /// Write the bundled reference marker as a PGM bitmap and ARPAT pattern.
    Marker {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        pattern_out: Option<PathBuf>,
        /// Bitmap side in pixels.
        #[arg(long, default_value_t = 256)]
        size: usize,
    },
    /// Render a synthetic camera frame showing the marker at a given pose.
    Synth(SynthArgs),
}

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub pattern: PathBuf,
    #[arg(long)]
    pub camera: PathBuf,
    #[arg(long)]
    pub marker_side: f64,
    #[arg(long, default_value_t = 0.0)]
    pub tilt_deg: f64,
    #[arg(long, default_value_t = 0.0)]
    pub yaw_deg: f64,
    #[arg(long)]
    pub distance: f64,
    #[arg(long, default_value_t = 640)]
    pub width: usize,
    #[arg(long, default_value_t = 480)]
    pub height: usize,
    #[arg(long, default_value_t = 255)]
    pub background: u8,
    /// Darken the frame with a left-to-right 60→200 brightness ramp.
    #[arg(long)]
    pub ramp: bool,
    #[arg(long)]
    pub out: PathBuf,
}
