use serde::Serialize;

use crate::analysis::ModelTransform;
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;
use crate::vision::{CameraIntrinsics, Pose};

use super::model_to_marker;

/// Camera-space depth (mm) at or below which a point counts as clipped.
pub const NEAR_PLANE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ProjectedPoint<T> {
    pub u: T,
    pub v: T,
    /// Camera-space depth, mm.
    pub z: T,
    pub clipped: bool,
}

/// Single affine map from model coordinates to camera coordinates.
pub fn camera_from_model<T: Real>(model: &ModelTransform<T>, pose: &Pose<T>) -> (Mat3<T>, Vec3<T>) {
    let (linear, offset) = model.affine();
    let rb = pose.rotation * model_to_marker();
    (rb * linear, rb * offset + pose.translation)
}

/// Projects model-space points through the model transform and the marker
/// pose. Clipped points keep their raw (possibly meaningless) `u, v`.
pub fn project_points<T: Real>(
    points: &[Vec3<T>],
    model: &ModelTransform<T>,
    pose: &Pose<T>,
    k: &CameraIntrinsics<T>,
) -> Vec<ProjectedPoint<T>> {
    let (linear, offset) = camera_from_model(model, pose);
    let near = T::lit(NEAR_PLANE);
    points
        .iter()
        .map(|&p| {
            let c = linear * p + offset;
            ProjectedPoint { u: k.fx * c.x / c.z + k.cx, v: k.fy * c.y / c.z + k.cy, z: c.z, clipped: !(c.z > near) }
        })
        .collect()
}
