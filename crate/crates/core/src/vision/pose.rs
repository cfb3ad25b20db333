use crate::linalg::{solve_linear, Mat3, Point2, Vec3};
use crate::scalar::Real;

use super::{CameraIntrinsics, Homography, Pose, VisionError};

const MAX_ITERATIONS: usize = 20;
const MAX_HALVINGS: usize = 10;
const MIN_IMPROVEMENT: f64 = 1e-10;

/// Marker corners in the marker frame (mm, `z = 0`), in detection order:
/// top-left, bottom-left, bottom-right, top-right.
pub fn marker_corners<T: Real>(side: T) -> [Vec3<T>; 4] {
    let h = side * T::lit(0.5);
    let z = T::zero();
    [Vec3::new(-h, -h, z), Vec3::new(-h, h, z), Vec3::new(h, h, z), Vec3::new(h, -h, z)]
}

/// Decomposes a marker-plane-to-image homography into a pose.
///
/// `h` must map marker-plane millimeters (corners at `±side/2`) to pixels.
/// The sign of the homography is chosen so the marker lies in front of the
/// camera; a marker seen from its back side is rejected.
pub fn pose_from_homography<T: Real>(h: &Homography<T>, k: &CameraIntrinsics<T>) -> Result<Pose<T>, VisionError> {
    let kinv = k.inverse_matrix();
    let m = kinv * *h.matrix();
    let (a1, a2, a3) = (m.col(0), m.col(1), m.col(2));
    let denom = a1.norm() + a2.norm();
    if !(denom > T::zero()) || !denom.is_finite() {
        return Err(VisionError::DegenerateConfiguration);
    }
    let mut lambda = T::lit(2.0) / denom;
    if a3.z * lambda < T::zero() {
        lambda = -lambda;
    }
    let t = a3 * lambda;
    let (r1, r2) = (a1 * lambda, a2 * lambda);
    let r3 = r1.cross(r2);
    if !(t.z > T::zero()) || !(r3.dot(t) > T::zero()) {
        return Err(VisionError::BehindCamera);
    }
    let rotation = Mat3::from_cols(r1, r2, r3).nearest_rotation().ok_or(VisionError::DegenerateConfiguration)?;
    Ok(Pose::new(rotation, t))
}

fn project_all<T: Real>(pose: &Pose<T>, k: &CameraIntrinsics<T>, side: T) -> Option<[Point2<T>; 4]> {
    let pts = marker_corners(side).map(|p| k.project(pose.transform(p)));
    let out = [pts[0]?, pts[1]?, pts[2]?, pts[3]?];
    out.iter().all(|p| p.x.is_finite() && p.y.is_finite()).then_some(out)
}

fn squared_error<T: Real>(pose: &Pose<T>, corners: &[Point2<T>; 4], k: &CameraIntrinsics<T>, side: T) -> Option<T> {
    let proj = project_all(pose, k, side)?;
    Some(proj.iter().zip(corners).fold(T::zero(), |acc, (p, q)| {
        let (dx, dy) = (p.x - q.x, p.y - q.y);
        acc + dx * dx + dy * dy
    }))
}

/// RMS distance (px) between the observed corners and those predicted by
/// `pose`; `None` if a corner would project from behind the camera.
pub fn reprojection_rms<T: Real>(
    pose: &Pose<T>,
    corners: &[Point2<T>; 4],
    k: &CameraIntrinsics<T>,
    side: T,
) -> Option<T> {
    squared_error(pose, corners, k, side).map(|e| (e / T::lit(4.0)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedPose<T> {
    pub pose: Pose<T>,
    pub initial_rms: T,
    pub final_rms: T,
    pub iterations: usize,
}

/// Gauss-Newton on the four corner reprojection errors.
///
/// The rotation is updated as `exp(ω)·R` and the translation additively.
/// Each step is halved until it lowers the error (at most 10 times); when
/// no halving helps, or the gain drops below 1e-10 px², or after 20
/// iterations, the current pose is returned. The error therefore never
/// increases. `Diverged` is reported when the normal equations cannot be
/// solved.
pub fn refine_pose<T: Real>(
    initial: &Pose<T>,
    corners: &[Point2<T>; 4],
    k: &CameraIntrinsics<T>,
    side: T,
) -> Result<RefinedPose<T>, VisionError> {
    if !(initial.translation.z > T::zero()) {
        return Err(VisionError::BehindCamera);
    }
    let mut pose = *initial;
    let mut err = squared_error(&pose, corners, k, side).ok_or(VisionError::BehindCamera)?;
    let initial_err = err;
    let mut iterations = 0;
    let model = marker_corners(side);

    while iterations < MAX_ITERATIONS {
        let mut jtj = [[T::zero(); 6]; 6];
        let mut jtr = [T::zero(); 6];
        for (x, obs) in model.iter().zip(corners) {
            let rx = pose.rotation * *x;
            let p = rx + pose.translation;
            let iz = T::one() / p.z;
            let du = [k.fx * iz, T::zero(), -k.fx * p.x * iz * iz];
            let dv = [T::zero(), k.fy * iz, -k.fy * p.y * iz * iz];
            let ru = k.fx * p.x * iz + k.cx - obs.x;
            let rv = k.fy * p.y * iz + k.cy - obs.y;
            // d p / d ω = -[R x]×, d p / d t = I
            let dw = Mat3::skew(rx).scale(-T::one());
            let row = |d: [T; 3]| {
                let mut j = [T::zero(); 6];
                for c in 0..3 {
                    j[c] = d[0] * dw.m[0][c] + d[1] * dw.m[1][c] + d[2] * dw.m[2][c];
                    j[c + 3] = d[c];
                }
                j
            };
            for (j, r) in [(row(du), ru), (row(dv), rv)] {
                for a in 0..6 {
                    jtr[a] += j[a] * r;
                    for b in 0..6 {
                        jtj[a][b] += j[a] * j[b];
                    }
                }
            }
        }
        let step = solve_linear(jtj, jtr.map(|v| -v), T::min_positive_value()).ok_or(VisionError::Diverged)?;

        let mut alpha = T::one();
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let w = Vec3::new(step[0], step[1], step[2]) * alpha;
            let dt = Vec3::new(step[3], step[4], step[5]) * alpha;
            let candidate = Pose::new(Mat3::exp_so3(w) * pose.rotation, pose.translation + dt);
            if let Some(e) = squared_error(&candidate, corners, k, side) {
                if e < err {
                    accepted = Some((candidate, e));
                    break;
                }
            }
            alpha *= T::lit(0.5);
        }
        let Some((candidate, e)) = accepted else { break };
        iterations += 1;
        let gain = err - e;
        pose = candidate;
        err = e;
        if gain < T::lit(MIN_IMPROVEMENT) {
            break;
        }
    }

    let four = T::lit(4.0);
    Ok(RefinedPose { pose, initial_rms: (initial_err / four).sqrt(), final_rms: (err / four).sqrt(), iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vision::homography_dlt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn camera() -> CameraIntrinsics<f64> {
        CameraIntrinsics::new(800.0, 800.0, 320.0, 240.0).unwrap()
    }

    /// Exact plane-to-image homography `K·[r1 r2 t]`.
    fn oracle_homography(pose: &Pose<f64>, k: &CameraIntrinsics<f64>) -> Homography<f64> {
        let r = pose.rotation;
        Homography::from_matrix(k.matrix() * Mat3::from_cols(r.col(0), r.col(1), pose.translation)).unwrap()
    }

    fn observe(pose: &Pose<f64>, k: &CameraIntrinsics<f64>, side: f64) -> [Point2<f64>; 4] {
        marker_corners(side).map(|p| k.project(pose.transform(p)).unwrap())
    }

    #[test]
    fn frontal_pose_recovered() {
        let truth = Pose::new(Mat3::identity(), Vec3::new(0.0, 0.0, 500.0));
        let p = pose_from_homography(&oracle_homography(&truth, &camera()), &camera()).unwrap();
        assert!((p.translation - truth.translation).norm() < 0.5);
        assert!(p.rotation_error(&truth).to_degrees() < 0.1);
    }

    #[test]
    fn pose_from_dlt_of_projected_corners() {
        let k = camera();
        let truth = Pose::facing_camera(30f64.to_radians(), 0.7, 500.0);
        let src = marker_corners(80.0).map(|p| Point2::new(p.x, p.y));
        let h = homography_dlt(&src, &observe(&truth, &k, 80.0)).unwrap();
        let p = pose_from_homography(&h, &k).unwrap();
        assert!(p.rotation_error(&truth).to_degrees() < 0.5);
        assert!((p.translation - truth.translation).norm() < 0.5);
        assert!(p.is_valid());
    }

    #[test]
    fn negated_homography_gives_same_pose() {
        let k = camera();
        let truth = Pose::facing_camera(0.4, -1.0, 700.0);
        let h = oracle_homography(&truth, &k);
        // same projective map, but a representative with h33 = 1 is fixed, so
        // flip the sign through the unnormalized matrix instead
        let flipped = Homography::from_matrix(h.matrix().scale(-3.0)).unwrap();
        let p = pose_from_homography(&flipped, &k).unwrap();
        assert!(p.rotation_error(&truth) < 1e-9);
    }

    #[test]
    fn back_side_is_behind_camera() {
        let k = camera();
        let from_behind = Pose::new(Mat3::rot_x(std::f64::consts::PI), Vec3::new(0.0, 0.0, 500.0));
        let h = oracle_homography(&from_behind, &k);
        assert_eq!(pose_from_homography(&h, &k), Err(VisionError::BehindCamera));
    }

    #[test]
    fn truth_is_a_fixed_point() {
        let k = camera();
        let truth = Pose::facing_camera(0.5, 1.2, 600.0);
        let r = refine_pose(&truth, &observe(&truth, &k, 80.0), &k, 80.0).unwrap();
        assert!(r.final_rms < 1e-9);
        assert!(r.pose.rotation_error(&truth) < 1e-9);
    }

    #[test]
    fn perturbed_start_converges() {
        let k = camera();
        let truth = Pose::facing_camera(0.6, -0.4, 500.0);
        let corners = observe(&truth, &k, 80.0);
        let start = Pose::new(
            Mat3::exp_so3(Vec3::new(1.0, 1.0, 0.0).normalized().unwrap() * 2f64.to_radians()) * truth.rotation,
            truth.translation + Vec3::new(3.0, -4.0, 0.0),
        );
        let r = refine_pose(&start, &corners, &k, 80.0).unwrap();
        assert!(r.pose.rotation_error(&truth).to_degrees() < 1e-4);
        assert!((r.pose.translation - truth.translation).norm() < 1e-3);
        assert!(r.final_rms < 1e-6);
    }

    #[test]
    fn noisy_corners_never_worse() {
        let k = camera();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let truth =
                Pose::facing_camera(rng.gen_range(0.0..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(300.0..1500.0));
            let corners = observe(&truth, &k, 80.0)
                .map(|p| Point2::new(p.x + rng.gen_range(-0.9..0.9), p.y + rng.gen_range(-0.9..0.9)));
            let r = refine_pose(&truth, &corners, &k, 80.0).unwrap();
            assert!(r.final_rms <= r.initial_rms);
            assert!(r.pose.is_valid());
        }
    }

    #[test]
    fn rejects_start_behind_camera() {
        let k = camera();
        let p = Pose::new(Mat3::identity(), Vec3::new(0.0, 0.0, -10.0));
        assert_eq!(refine_pose(&p, &[Point2::new(0.0, 0.0); 4], &k, 80.0), Err(VisionError::BehindCamera));
    }
}
