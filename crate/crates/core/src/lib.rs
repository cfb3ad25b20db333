//! Print-debugging toolkit for 3D models.
//!
//! Loads STL models, checks them for printability defects (gaps, stray
//! shells, inverted orientation), finds a trained square fiducial marker in
//! grayscale camera frames, recovers its pose, and renders the model over
//! the frame anchored to the marker.
//!
//! Geometry is generic over the scalar type ([`Real`]: `f32` or `f64`); the
//! aliases below fix it to `f64`, which is what the command-line tool uses.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod image;
pub mod linalg;
pub mod mesh;
pub mod render;
pub mod scalar;
pub mod session;
pub mod stl;
pub mod vision;

pub use scalar::Real;

pub type Vec3d = linalg::Vec3<f64>;
pub type Mat3d = linalg::Mat3<f64>;
pub type Point2d = linalg::Point2<f64>;
pub type Mesh = mesh::IndexedMesh<f64>;
pub type MeshF32 = mesh::IndexedMesh<f32>;
pub type Soup = stl::TriangleSoup<f64>;
pub type Report = analysis::PrintabilityReport<f64>;
pub type Transform = analysis::ModelTransform<f64>;
pub type Homography = vision::Homography<f64>;
pub type Intrinsics = vision::CameraIntrinsics<f64>;
pub type Pose = vision::Pose<f64>;
pub type Detection = vision::Detection<f64>;
