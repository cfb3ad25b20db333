use crate::image::Frame;
use crate::linalg::Vec3;
use crate::scalar::Real;
use crate::vision::{marker_corners, CameraIntrinsics, MarkerPattern, Pose};

use super::{RenderError, NEAR_PLANE};

const SUBSAMPLES: [(f64, f64); 4] = [(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)];

/// Renders the marker (black border, piecewise-constant pattern cells) seen from
/// `pose` over a uniform `background`, with 2×2 supersampling per pixel.
///
/// `side` is the full marker side in mm. Fails when any marker corner falls
/// outside the image or behind the camera.
pub fn synthesize_marker_frame<T: Real>(
    pattern: &MarkerPattern,
    pose: &Pose<T>,
    k: &CameraIntrinsics<T>,
    side: T,
    width: usize,
    height: usize,
    background: u8,
) -> Result<Frame, RenderError> {
    let pose = pose.cast::<f64>();
    let k = k.cast::<f64>();
    let side = side.to_f64_lossless();
    for c in marker_corners(side) {
        let p = pose.transform(c);
        if !(p.z > NEAR_PLANE) {
            return Err(RenderError::OutsideFrustum);
        }
        let q = k.project(p).ok_or(RenderError::OutsideFrustum)?;
        if !(q.x >= 0.0 && q.y >= 0.0 && q.x <= width as f64 && q.y <= height as f64) {
            return Err(RenderError::OutsideFrustum);
        }
    }

    let normal = pose.rotation.col(2);
    let plane_d = normal.dot(pose.translation);
    let rt = pose.rotation.transpose();
    let bf = pattern.border_fraction();
    let n = pattern.n() as f64;
    let sample = |u: f64, v: f64| -> f64 {
        let ray = Vec3::new((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
        let denom = normal.dot(ray);
        if denom == 0.0 {
            return f64::from(background);
        }
        let s = plane_d / denom;
        if !(s > 0.0) {
            return f64::from(background);
        }
        let m = rt * (ray * s - pose.translation);
        let (mu, mv) = (m.x / side + 0.5, m.y / side + 0.5);
        if !(0.0..=1.0).contains(&mu) || !(0.0..=1.0).contains(&mv) {
            return f64::from(background);
        }
        if mu < bf || mu > 1.0 - bf || mv < bf || mv > 1.0 - bf {
            return 0.0;
        }
        let span = 1.0 - 2.0 * bf;
        f64::from(pattern.cell_at((mu - bf) / span * n, (mv - bf) / span * n))
    };

    Frame::from_fn(width, height, |x, y| {
        let acc: f64 = SUBSAMPLES.iter().map(|&(dx, dy)| sample(x as f64 + dx, y as f64 + dy)).sum();
        (acc / 4.0).round() as u8
    })
    .map_err(|_| RenderError::InvalidDimensions(width, height))
}

/// Scales luminance by a horizontal gain running linearly from `lo/255` at
/// the left column to `hi/255` at the right, so a white surface reads `lo` on
/// one side and `hi` on the other.
pub fn brightness_ramp(frame: &Frame, lo: u8, hi: u8) -> Frame {
    let w = frame.width();
    let denom = (w.max(2) - 1) as f64;
    Frame::from_fn(w, frame.height(), |x, y| {
        let gain = f64::from(lo) + (f64::from(hi) - f64::from(lo)) * x as f64 / denom;
        (f64::from(frame.get(x, y)) * gain / 255.0).round() as u8
    })
    .expect("same dimensions as a valid frame")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat3;
    use crate::vision::reference_pattern;

    fn camera() -> CameraIntrinsics<f64> {
        CameraIntrinsics::new(800.0, 800.0, 320.0, 240.0).unwrap()
    }

    #[test]
    fn marker_out_of_view() {
        let pose = Pose::new(Mat3::identity(), Vec3::new(5000.0, 0.0, 500.0));
        assert_eq!(
            synthesize_marker_frame(&reference_pattern(), &pose, &camera(), 80.0, 640, 480, 255),
            Err(RenderError::OutsideFrustum)
        );
        let behind = Pose::new(Mat3::identity(), Vec3::new(0.0, 0.0, -500.0));
        assert_eq!(
            synthesize_marker_frame(&reference_pattern(), &behind, &camera(), 80.0, 640, 480, 255),
            Err(RenderError::OutsideFrustum)
        );
    }

    #[test]
    fn black_pattern_gives_dark_square() {
        let p = MarkerPattern::new(4, 0.25, vec![0; 16]).unwrap();
        let pose = Pose::new(Mat3::identity(), Vec3::new(0.0, 0.0, 500.0));
        let f = synthesize_marker_frame(&p, &pose, &camera(), 80.0, 640, 480, 200).unwrap();
        // marker spans 128 px centered on (320, 240): [256, 384)
        for y in 0..480 {
            for x in 0..640 {
                let inside = (256..384).contains(&x) && (176..304).contains(&y);
                assert_eq!(f.get(x, y), if inside { 0 } else { 200 }, "({x},{y})");
            }
        }
    }

    #[test]
    fn frontal_frame_shows_pattern_cells() {
        let p = reference_pattern();
        let pose = Pose::new(Mat3::identity(), Vec3::new(0.0, 0.0, 500.0));
        let f = synthesize_marker_frame(&p, &pose, &camera(), 160.0, 640, 480, 255).unwrap();
        // 256 px marker at [192, 448) x [112, 368); interior [256, 384) x [176, 304), 8 px cells
        for r in 0..16 {
            for c in 0..16 {
                let (x, y) = (256 + 8 * c + 4, 176 + 8 * r + 4);
                assert_eq!(f.get(x, y), p.get(r, c), "cell ({r},{c})");
            }
        }
    }

    #[test]
    fn ramp_endpoints() {
        let f = Frame::filled(100, 20, 255).unwrap();
        let g = brightness_ramp(&f, 60, 200);
        assert_eq!(g.get(0, 5), 60);
        assert_eq!(g.get(99, 5), 200);
        let black = brightness_ramp(&Frame::filled(100, 20, 0).unwrap(), 60, 200);
        assert!(black.data().iter().all(|&v| v == 0));
    }

    #[test]
    fn synthesis_is_deterministic() {
        let pose = Pose::facing_camera(0.4, 0.9, 600.0);
        let a = synthesize_marker_frame(&reference_pattern(), &pose, &camera(), 100.0, 640, 480, 255).unwrap();
        let b = synthesize_marker_frame(&reference_pattern(), &pose, &camera(), 100.0, 640, 480, 255).unwrap();
        assert_eq!(a, b);
    }
}
