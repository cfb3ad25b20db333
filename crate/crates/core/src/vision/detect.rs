use crate::image::Frame;
use crate::linalg::{Mat3, Point2};
use crate::scalar::Real;

use super::{
    adaptive_threshold, extract_quads, homography_dlt, marker_corners, match_pattern, pose_from_homography,
    refine_pose, refine_quad_edges, sample_grid, CameraIntrinsics, Detection, Homography, MarkerPattern, VisionError,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    /// Adaptive threshold window, px (odd).
    pub window: usize,
    /// Luminance margin below the local mean for a pixel to count as dark.
    pub offset: i32,
    /// Smallest quad kept, px².
    pub min_area: f64,
    pub match_threshold: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self { window: 31, offset: 7, min_area: 400.0, match_threshold: 0.75 }
    }
}

fn unit_square<T: Real>() -> [Point2<T>; 4] {
    let (z, o) = (T::zero(), T::one());
    [Point2::new(z, z), Point2::new(z, o), Point2::new(o, o), Point2::new(o, z)]
}

/// Homography from the interior unit square (border removed) into the image
/// for a quad whose corners are in detection order.
fn interior_homography<T: Real>(quad: &[Point2<T>; 4], border: T) -> Result<Homography<T>, VisionError> {
    let full = homography_dlt(&unit_square(), quad)?;
    let (z, o) = (T::zero(), T::one());
    let span = o - border - border;
    let inset = Homography::from_matrix(Mat3::from_rows([[span, z, border], [z, span, border], [z, z, o]]))?;
    full.compose(&inset)
}

fn detect_in_quad<T: Real>(
    frame: &Frame,
    quad: [Point2<T>; 4],
    pattern: &MarkerPattern,
    k: &CameraIntrinsics<T>,
    side: T,
    threshold: f64,
) -> Option<Detection<T>> {
    let interior = interior_homography(&quad, T::lit(pattern.border_fraction())).ok()?;
    let samples = sample_grid(frame, &interior, pattern.n()).ok()?;
    let m = match_pattern(&samples, pattern, threshold).ok()??;

    let k_rot = usize::from(m.rotation_index);
    let corners: [Point2<T>; 4] = std::array::from_fn(|j| quad[(j + k_rot) % 4]);
    let plane = marker_corners(side).map(|p| Point2::new(p.x, p.y));
    let h = homography_dlt(&plane, &corners).ok()?;
    let initial = pose_from_homography(&h, k).ok()?;
    let refined = refine_pose(&initial, &corners, k, side).ok()?;
    let pose = refined.pose;
    Some(Detection {
        pose,
        confidence: T::lit(m.confidence),
        rotation_index: m.rotation_index,
        corners,
        yaw: pose.yaw(),
        reprojection_rms: refined.final_rms,
    })
}

/// Finds the trained marker in `frame` and estimates its pose.
///
/// Every quad found in the thresholded frame is sampled and matched against
/// `pattern`; the most confident match above the threshold wins (the first
/// one on ties). `side` is the physical marker side in millimeters,
/// border included.
pub fn detect_marker<T: Real>(
    frame: &Frame,
    pattern: &MarkerPattern,
    k: &CameraIntrinsics<T>,
    side: T,
    config: &DetectorConfig,
) -> Result<Option<Detection<T>>, VisionError> {
    let binary = adaptive_threshold(frame, config.window, config.offset)?;
    let mut best: Option<Detection<T>> = None;
    for quad in extract_quads(&binary, config.min_area) {
        let fine = refine_quad_edges(frame, &quad.corners);
        let q = fine.map(|p| Point2::new(T::lit(p.x), T::lit(p.y)));
        if let Some(d) = detect_in_quad(frame, q, pattern, k, side, config.match_threshold) {
            if best.as_ref().is_none_or(|b| d.confidence > b.confidence) {
                best = Some(d);
            }
        }
    }
    Ok(best)
}
