//! Software overlay renderer and synthetic marker frames.
//!
//! Models are y-up. When a model rides on the marker, model +y becomes the
//! marker's outward normal (marker −z, towards the camera), model +x stays
//! marker +x and model +z becomes marker +y, so a camera-space point is
//! `R·(B·M·p) + t` with `B` = [`MODEL_TO_MARKER`].

mod composite;
mod project;
mod raster;
mod synth;

use thiserror::Error;

use crate::linalg::Mat3;
use crate::scalar::Real;

pub use composite::{composite_overlay, WIREFRAME_COLOR};
pub use project::{camera_from_model, project_points, ProjectedPoint, NEAR_PLANE};
pub use raster::{rasterize, ProjectedEdge, RenderedImage, AMBIENT, MODEL_COLOR};
pub use synth::{brightness_ramp, synthesize_marker_frame};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("frame is {frame:?} but the render is {render:?}")]
    DimensionMismatch { frame: (usize, usize), render: (usize, usize) },
    #[error("marker is not fully inside the view")]
    OutsideFrustum,
    #[error("image dimensions {0}x{1} are not usable")]
    InvalidDimensions(usize, usize),
}

/// Basis change from the y-up model frame to the marker frame.
pub fn model_to_marker<T: Real>() -> Mat3<T> {
    let (z, o) = (T::zero(), T::one());
    Mat3::from_rows([[o, z, z], [z, z, o], [z, -o, z]])
}

/// [`model_to_marker`] for `f64`.
pub const MODEL_TO_MARKER: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]];
