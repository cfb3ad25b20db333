use serde::{Deserialize, Serialize};

use crate::linalg::{Mat3, Vec3};
use crate::mesh::IndexedMesh;
use crate::scalar::Real;

use super::AnalysisError;

/// Placement of a model in its display frame.
///
/// A model point `p` maps to `scale · Rz·Ry·Rx · (p + translation)`: the
/// translation moves the pivot (normally the bounding-box center) to the
/// origin, then the X, Y and Z rotations apply in that order, then the
/// uniform scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ModelTransform<T> {
    pub rot_x: T,
    pub rot_y: T,
    pub rot_z: T,
    pub scale: T,
    pub translation: Vec3<T>,
}

impl<T: Real> Default for ModelTransform<T> {
    fn default() -> Self {
        Self { rot_x: T::zero(), rot_y: T::zero(), rot_z: T::zero(), scale: T::one(), translation: Vec3::zero() }
    }
}

impl<T: Real> ModelTransform<T> {
    pub fn rotation(&self) -> Mat3<T> {
        Mat3::rot_z(self.rot_z) * Mat3::rot_y(self.rot_y) * Mat3::rot_x(self.rot_x)
    }

    /// Linear part `scale · R` and offset, so that `apply(p) = linear·p + offset`.
    pub fn affine(&self) -> (Mat3<T>, Vec3<T>) {
        let linear = self.rotation().scale(self.scale);
        (linear, linear * self.translation)
    }

    pub fn apply(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation() * (p + self.translation) * self.scale
    }

    pub fn cast<U: Real>(&self) -> ModelTransform<U> {
        let c = |v: T| U::lit(v.to_f64_lossless());
        ModelTransform {
            rot_x: c(self.rot_x),
            rot_y: c(self.rot_y),
            rot_z: c(self.rot_z),
            scale: c(self.scale),
            translation: self.translation.cast(),
        }
    }
}

/// Uniform scale that brings the largest bounding-box extent to
/// `target_extent`, with the bounding box centered on the origin.
pub fn fit_transform<T: Real>(mesh: &IndexedMesh<T>, target_extent: T) -> Result<ModelTransform<T>, AnalysisError> {
    if !(target_extent > T::zero()) || !target_extent.is_finite() {
        return Err(AnalysisError::InvalidTargetExtent);
    }
    let bbox = mesh.bbox().ok_or(AnalysisError::DegenerateExtent)?;
    let extent = bbox.max_extent();
    if !(extent > T::zero()) {
        return Err(AnalysisError::DegenerateExtent);
    }
    Ok(ModelTransform { scale: target_extent / extent, translation: -bbox.center(), ..Default::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::box_mesh;

    #[test]
    fn fit_scales_largest_extent() {
        let m = box_mesh(Vec3::new(0.0, 0.0, 0.0), Vec3::new(200.0, 50.0, 10.0));
        let t = fit_transform(&m, 80.0).unwrap();
        assert_eq!(t.scale, 0.4);
        assert_eq!(t.translation, Vec3::new(-100.0, -25.0, -5.0));
        assert_eq!((t.rot_x, t.rot_y, t.rot_z), (0.0, 0.0, 0.0));

        let m = box_mesh(Vec3::splat(-40.0), Vec3::splat(40.0));
        assert_eq!(fit_transform(&m, 80.0).unwrap().scale, 1.0);

        let m = box_mesh(Vec3::new(5.0, -1.0, -1.0), Vec3::new(15.0, 1.0, 1.0));
        assert_eq!(fit_transform(&m, 80.0).unwrap().translation, Vec3::new(-10.0, 0.0, 0.0));
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        let point = IndexedMesh::new(vec![Vec3::splat(1.0)], vec![[0, 0, 0]]);
        assert_eq!(fit_transform(&point, 80.0), Err(AnalysisError::DegenerateExtent));
        assert_eq!(fit_transform(&IndexedMesh::<f64>::default(), 80.0), Err(AnalysisError::DegenerateExtent));
        let m = box_mesh(Vec3::zero(), Vec3::splat(1.0));
        assert_eq!(fit_transform(&m, 0.0), Err(AnalysisError::InvalidTargetExtent));
    }

    #[test]
    fn rotation_order_is_x_then_y_then_z() {
        let t = ModelTransform { rot_x: 0.3, rot_y: -1.2, rot_z: 2.0, ..Default::default() };
        let p = Vec3::new(1.0, 2.0, 3.0);
        let stepwise = Mat3::rot_z(2.0) * (Mat3::rot_y(-1.2) * (Mat3::rot_x(0.3) * p));
        assert!((t.apply(p) - stepwise).norm() < 1e-14);
        let (lin, off) = t.affine();
        assert!((lin * p + off - t.apply(p)).norm() < 1e-14);
    }
}
