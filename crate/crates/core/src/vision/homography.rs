use serde::Serialize;

use crate::linalg::{solve_linear, Mat3, Point2, Vec3};
use crate::scalar::Real;

use super::VisionError;

/// Plane-to-plane projective map, scaled so that element (3,3) is 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct Homography<T> {
    matrix: Mat3<T>,
}

impl<T: Real> Homography<T> {
    /// Normalizes `m` so that `m[2][2] = 1`. Fails for non-invertible matrices
    /// or a vanishing (3,3) element.
    pub fn from_matrix(m: Mat3<T>) -> Result<Self, VisionError> {
        let h33 = m.m[2][2];
        if h33 == T::zero() || !h33.is_finite() {
            return Err(VisionError::DegenerateConfiguration);
        }
        let matrix = m.scale(T::one() / h33);
        if !(matrix.det().abs() > T::lit(1e-12)) {
            return Err(VisionError::DegenerateConfiguration);
        }
        Ok(Self { matrix })
    }

    #[inline]
    pub fn matrix(&self) -> &Mat3<T> {
        &self.matrix
    }

    /// Maps a point; `None` if it lands on the line at infinity.
    #[inline]
    pub fn apply(&self, p: Point2<T>) -> Option<Point2<T>> {
        let q = self.matrix * Vec3::new(p.x, p.y, T::one());
        (q.z != T::zero()).then(|| Point2::new(q.x / q.z, q.y / q.z))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self, VisionError> {
        Self::from_matrix(self.matrix * other.matrix)
    }

    pub fn inverse(&self) -> Result<Self, VisionError> {
        Self::from_matrix(self.matrix.inverse().ok_or(VisionError::DegenerateConfiguration)?)
    }
}

/// Similarity moving the centroid to the origin and the mean distance to √2.
fn conditioner<T: Real>(pts: &[Point2<T>; 4]) -> Mat3<T> {
    let four = T::lit(4.0);
    let cx = pts.iter().fold(T::zero(), |a, p| a + p.x) / four;
    let cy = pts.iter().fold(T::zero(), |a, p| a + p.y) / four;
    let mean = pts.iter().fold(T::zero(), |a, p| a + (p.x - cx).hypot(p.y - cy)) / four;
    let s = if mean > T::zero() { T::SQRT_2() / mean } else { T::one() };
    let z = T::zero();
    Mat3::from_rows([[s, z, -s * cx], [z, s, -s * cy], [z, z, T::one()]])
}

fn transform<T: Real>(m: &Mat3<T>, p: Point2<T>) -> Point2<T> {
    let q = *m * Vec3::new(p.x, p.y, T::one());
    Point2::new(q.x / q.z, q.y / q.z)
}

fn has_collinear_triple<T: Real>(pts: &[Point2<T>; 4]) -> bool {
    const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    TRIPLES.iter().any(|&[a, b, c]| {
        let (p, q, r) = (pts[a], pts[b], pts[c]);
        let cross = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
        !(cross.abs() > T::lit(1e-9))
    })
}

/// Exact homography from four correspondences (`H·src_i ∝ dst_i`).
///
/// Both point sets are conditioned (centroid to origin, mean distance √2)
/// before the 8×8 linear system is solved with `h33 = 1`.
pub fn homography_dlt<T: Real>(src: &[Point2<T>; 4], dst: &[Point2<T>; 4]) -> Result<Homography<T>, VisionError> {
    let ts = conditioner(src);
    let td = conditioner(dst);
    let s = src.map(|p| transform(&ts, p));
    let d = dst.map(|p| transform(&td, p));
    if has_collinear_triple(&s) || has_collinear_triple(&d) {
        return Err(VisionError::DegenerateConfiguration);
    }

    let z = T::zero();
    let o = T::one();
    let mut a = [[z; 8]; 8];
    let mut b = [z; 8];
    for i in 0..4 {
        let (x, y, u, v) = (s[i].x, s[i].y, d[i].x, d[i].y);
        a[2 * i] = [x, y, o, z, z, z, -u * x, -u * y];
        b[2 * i] = u;
        a[2 * i + 1] = [z, z, z, x, y, o, -v * x, -v * y];
        b[2 * i + 1] = v;
    }
    let h = solve_linear(a, b, T::lit(1e-12)).ok_or(VisionError::DegenerateConfiguration)?;
    let hn = Mat3::from_rows([[h[0], h[1], h[2]], [h[3], h[4], h[5]], [h[6], h[7], o]]);
    let td_inv = td.inverse().ok_or(VisionError::DegenerateConfiguration)?;
    Homography::from_matrix(td_inv * hn * ts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> [Point2<f64>; 4] {
        [Point2::new(0.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 1.0), Point2::new(1.0, 0.0)]
    }

    #[test]
    fn identity_from_identical_squares() {
        let h = homography_dlt(&unit_square(), &unit_square()).unwrap();
        assert!(h.matrix().sub(&Mat3::identity()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn recovers_scale_and_translation() {
        let known = Mat3::from_rows([[2.0, 0.0, 3.0], [0.0, 2.0, 5.0], [0.0, 0.0, 1.0]]);
        let src = unit_square();
        let dst = src.map(|p| transform(&known, p));
        let h = homography_dlt(&src, &dst).unwrap();
        for (s, d) in src.iter().zip(&dst) {
            assert!(h.apply(*s).unwrap().distance(*d) < 1e-9);
        }
        assert!(h.matrix().sub(&known).frobenius_norm() < 1e-12);
    }

    #[test]
    fn recovers_projective_map() {
        let known = Mat3::from_rows([[1.1, 0.2, 30.0], [-0.1, 0.9, 12.0], [1e-3, -2e-3, 1.0]]);
        let src =
            [Point2::new(10.0, 20.0), Point2::new(15.0, 200.0), Point2::new(220.0, 180.0), Point2::new(190.0, 5.0)];
        let dst = src.map(|p| transform(&known, p));
        let h = homography_dlt(&src, &dst).unwrap();
        assert!(h.matrix().sub(&known).frobenius_norm() < 1e-9);
        let inv = h.inverse().unwrap();
        assert!(inv.apply(dst[2]).unwrap().distance(src[2]) < 1e-9);
    }

    #[test]
    fn collinear_source_is_degenerate() {
        let src = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0), Point2::new(0.0, 3.0)];
        assert_eq!(homography_dlt(&src, &unit_square()), Err(VisionError::DegenerateConfiguration));
        assert_eq!(homography_dlt(&unit_square(), &src), Err(VisionError::DegenerateConfiguration));
    }

    #[test]
    fn f32_instantiation() {
        let sq = unit_square().map(|p| Point2::new(p.x as f32, p.y as f32));
        let dst = sq.map(|p| Point2::new(3.0 * p.x + 1.0, 3.0 * p.y - 2.0));
        let h = homography_dlt(&sq, &dst).unwrap();
        assert!(h.apply(sq[2]).unwrap().distance(dst[2]) < 1e-4);
    }
}
