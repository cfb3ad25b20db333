//! Square fiducial marker detection and planar pose estimation.
//!
//! Pipeline: adaptive threshold → outer contours → quadrilaterals →
//! sub-pixel edge fit on the grayscale frame → homography per quad →
//! interior grid sampling → pattern match → pose from homography →
//! Gauss-Newton refinement on the four corners.
//!
//! Conventions: image coordinates are y-down with pixel `(i, j)` covering
//! `[i, i+1) × [j, j+1)`. The camera frame is right-handed with +z forward.
//! The marker plane is `z = 0` in the marker frame with corners at
//! `(±side/2, ±side/2)`; for the identity rotation the marker's x axis points
//! right and its y axis down in the image, so the printed pattern appears
//! upright. Corner lists run counter-clockwise as seen on screen, starting
//! at the pattern's top-left: top-left, bottom-left, bottom-right, top-right.

mod detect;
mod homography;
mod pattern;
mod pose;
mod quads;
mod subpixel;
mod threshold;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Mat3, Point2, Vec3};
use crate::scalar::Real;

pub use detect::{detect_marker, DetectorConfig};
pub use homography::{homography_dlt, Homography};
pub use pattern::{
    match_pattern, reference_marker_image, reference_pattern, rotate_grid_ccw, sample_grid, train_pattern,
    MarkerPattern, PatternMatch, DEFAULT_BORDER_FRACTION, DEFAULT_GRID,
};
pub use pose::{marker_corners, pose_from_homography, refine_pose, reprojection_rms, RefinedPose};
pub use quads::{extract_quads, QuadCandidate};
pub use subpixel::refine_quad_edges;
pub use threshold::adaptive_threshold;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VisionError {
    #[error("threshold window must be odd and at least 3, got {0}")]
    InvalidWindow(usize),
    #[error("degenerate point configuration (three collinear points)")]
    DegenerateConfiguration,
    #[error("sample point falls outside the frame")]
    OutOfFrame,
    #[error("image is {width}x{height}; training a {n}x{n} grid needs at least {min}x{min}", min = 2 * n)]
    TooSmall { width: usize, height: usize, n: usize },
    #[error("marker would lie behind the camera")]
    BehindCamera,
    #[error("pose refinement diverged")]
    Diverged,
    #[error("sample grid has {samples} values, pattern expects {expected}")]
    GridMismatch { samples: usize, expected: usize },
    #[error("invalid marker pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid camera intrinsics: {0}")]
    InvalidIntrinsics(String),
}

/// Pinhole intrinsics in pixels; lens distortion is not modeled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CameraIntrinsics<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
}

impl<T: Real> CameraIntrinsics<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T) -> Result<Self, VisionError> {
        if !(fx > T::zero() && fy > T::zero()) || !fx.is_finite() || !fy.is_finite() {
            return Err(VisionError::InvalidIntrinsics("focal lengths must be positive and finite".into()));
        }
        if !cx.is_finite() || !cy.is_finite() {
            return Err(VisionError::InvalidIntrinsics("principal point must be finite".into()));
        }
        Ok(Self { fx, fy, cx, cy })
    }

    pub fn matrix(&self) -> Mat3<T> {
        let (z, o) = (T::zero(), T::one());
        Mat3::from_rows([[self.fx, z, self.cx], [z, self.fy, self.cy], [z, z, o]])
    }

    pub fn inverse_matrix(&self) -> Mat3<T> {
        let (z, o) = (T::zero(), T::one());
        Mat3::from_rows([[o / self.fx, z, -self.cx / self.fx], [z, o / self.fy, -self.cy / self.fy], [z, z, o]])
    }

    /// Projects a camera-space point; `None` when it is not in front of the camera.
    #[inline]
    pub fn project(&self, p: Vec3<T>) -> Option<Point2<T>> {
        (p.z > T::zero()).then(|| Point2::new(self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy))
    }

    pub fn cast<U: Real>(&self) -> CameraIntrinsics<U> {
        let c = |v: T| U::lit(v.to_f64_lossless());
        CameraIntrinsics { fx: c(self.fx), fy: c(self.fy), cx: c(self.cx), cy: c(self.cy) }
    }
}

/// Rigid transform taking marker-frame points (mm) to camera-frame points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Pose<T> {
    pub rotation: Mat3<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> Pose<T> {
    pub fn new(rotation: Mat3<T>, translation: Vec3<T>) -> Self {
        Self { rotation, translation }
    }

    /// Marker on the optical axis at `distance`, tilted about its x axis and
    /// spun about its normal by `yaw` (counter-clockwise as seen from the
    /// camera).
    pub fn facing_camera(tilt: T, yaw: T, distance: T) -> Self {
        Self { rotation: Mat3::rot_x(tilt) * Mat3::rot_z(-yaw), translation: Vec3::new(T::zero(), T::zero(), distance) }
    }

    #[inline]
    pub fn transform(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation * p + self.translation
    }

    pub fn is_valid(&self) -> bool {
        self.rotation.orthonormality_error() < T::lit(1e-9)
            && self.rotation.det() > T::zero()
            && self.translation.z > T::zero()
    }

    /// Spin about the marker normal, in radians within `(-π, π]`, positive
    /// when the marker turns counter-clockwise as seen from the camera.
    ///
    /// This is the twist component of the rotation about the marker's own z
    /// axis, so composing with a spin `Rz(-φ)` on the marker side changes it
    /// by exactly `φ` regardless of tilt.
    pub fn yaw(&self) -> T {
        let [w, _, _, z] = self.rotation.to_quaternion();
        wrap_angle(-(z.atan2(w) * T::lit(2.0)))
    }

    /// Angle of the relative rotation between two poses, in radians.
    pub fn rotation_error(&self, other: &Self) -> T {
        (self.rotation.transpose() * other.rotation).rotation_angle()
    }

    pub fn cast<U: Real>(&self) -> Pose<U> {
        Pose { rotation: self.rotation.cast(), translation: self.translation.cast() }
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle<T: Real>(a: T) -> T {
    let two_pi = T::TAU();
    let mut r = a % two_pi;
    if r <= -T::PI() {
        r += two_pi;
    } else if r > T::PI() {
        r -= two_pi;
    }
    r
}

/// A recognized marker.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct Detection<T> {
    pub pose: Pose<T>,
    pub confidence: T,
    /// Quarter turns (counter-clockwise on screen) of the pattern relative
    /// to the quad's own corner order.
    pub rotation_index: u8,
    /// Image corners starting at the pattern's top-left, counter-clockwise on screen.
    pub corners: [Point2<T>; 4],
    pub yaw: T,
    /// RMS corner reprojection error of the final pose, px.
    pub reprojection_rms: T,
}
