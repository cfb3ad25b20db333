use crate::analysis::ModelTransform;
use crate::linalg::Vec3;
use crate::mesh::IndexedMesh;
use crate::scalar::Real;
use crate::vision::{CameraIntrinsics, Pose};

use super::{camera_from_model, RenderError, NEAR_PLANE};

/// Base color of rendered geometry before shading.
pub const MODEL_COLOR: [u8; 3] = [90, 170, 255];
/// Luminance floor added to the diffuse term.
pub const AMBIENT: f64 = 0.2;

/// A triangle edge in screen space, kept for wireframe overlays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedEdge {
    pub a: [f64; 3],
    pub b: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedImage {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB.
    pub color: Vec<u8>,
    /// Camera-space z per pixel, `+∞` where nothing was drawn.
    pub depth: Vec<f32>,
    /// Edges of every face that was rasterized, as `(u, v, z)`.
    pub edges: Vec<ProjectedEdge>,
}

impl RenderedImage {
    pub fn empty(width: usize, height: usize) -> Result<Self, RenderError> {
        if width == 0 || height == 0 {
            return Err(RenderError::InvalidDimensions(width, height));
        }
        Ok(Self {
            width,
            height,
            color: vec![0; width * height * 3],
            depth: vec![f32::INFINITY; width * height],
            edges: Vec::new(),
        })
    }

    #[inline]
    pub fn covered(&self, x: usize, y: usize) -> bool {
        self.depth[y * self.width + x].is_finite()
    }

    pub fn coverage(&self) -> usize {
        self.depth.iter().filter(|d| d.is_finite()).count()
    }

    #[inline]
    pub fn color_at(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.color[i], self.color[i + 1], self.color[i + 2]]
    }
}

fn orient(a: [f64; 3], b: [f64; 3], px: f64, py: f64) -> f64 {
    (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0])
}

/// Edge `a → b` of a triangle with positive [`orient`] area owns the pixels
/// lying exactly on it when it is a top or left edge.
fn is_top_left(a: [f64; 3], b: [f64; 3]) -> bool {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    dy < 0.0 || (dy == 0.0 && dx > 0.0)
}

fn shade(normal: Vec3<f64>) -> [u8; 3] {
    // light travels along +z, so surfaces facing the camera have n.z < 0
    let diffuse = normal.normalized().map_or(0.0, |n| (-n.z).max(0.0));
    let l = AMBIENT + (1.0 - AMBIENT) * diffuse;
    MODEL_COLOR.map(|c| (f64::from(c) * l).round() as u8)
}

fn fill_triangle(img: &mut RenderedImage, v: [[f64; 3]; 3], color: [u8; 3]) {
    let [mut a, mut b, c] = v;
    let mut area = orient(a, b, c[0], c[1]);
    if area == 0.0 || !area.is_finite() {
        return;
    }
    if area < 0.0 {
        std::mem::swap(&mut a, &mut b);
        area = -area;
    }
    let (w, h) = (img.width as f64, img.height as f64);
    let min_x = a[0].min(b[0]).min(c[0]).floor().max(0.0);
    let max_x = a[0].max(b[0]).max(c[0]).ceil().min(w);
    let min_y = a[1].min(b[1]).min(c[1]).floor().max(0.0);
    let max_y = a[1].max(b[1]).max(c[1]).ceil().min(h);
    if min_x >= max_x || min_y >= max_y {
        return;
    }
    let edges = [(b, c), (c, a), (a, b)];
    let owns = edges.map(|(p, q)| is_top_left(p, q));
    let inv_z = [1.0 / a[2], 1.0 / b[2], 1.0 / c[2]];

    for y in min_y as usize..max_y as usize {
        let py = y as f64 + 0.5;
        for x in min_x as usize..max_x as usize {
            let px = x as f64 + 0.5;
            let wts = edges.map(|(p, q)| orient(p, q, px, py));
            if !(0..3).all(|i| wts[i] > 0.0 || (wts[i] == 0.0 && owns[i])) {
                continue;
            }
            // barycentric weights of a, b, c are the edge functions opposite them
            let iz = (wts[0] * inv_z[0] + wts[1] * inv_z[1] + wts[2] * inv_z[2]) / area;
            let z = (1.0 / iz) as f32;
            let idx = y * img.width + x;
            if z < img.depth[idx] {
                img.depth[idx] = z;
                img.color[3 * idx..3 * idx + 3].copy_from_slice(&color);
            }
        }
    }
}

/// Z-buffered, flat-shaded rendering of `mesh` placed by `model` on the
/// marker at `pose`.
///
/// Pixels are sampled at their centers with a top-left fill rule. Faces
/// with any vertex at or in front of the near plane are skipped whole.
pub fn rasterize<T: Real>(
    mesh: &IndexedMesh<T>,
    model: &ModelTransform<T>,
    pose: &Pose<T>,
    k: &CameraIntrinsics<T>,
    width: usize,
    height: usize,
) -> Result<RenderedImage, RenderError> {
    let mut img = RenderedImage::empty(width, height)?;
    let (linear, offset) = camera_from_model(&model.cast(), &pose.cast());
    let k = k.cast::<f64>();
    let cam: Vec<Vec3<f64>> = mesh.vertices.iter().map(|&p| linear * p.cast() + offset).collect();

    for face in &mesh.faces {
        let tri = face.map(|i| cam[i as usize]);
        if tri.iter().any(|p| !(p.z > NEAR_PLANE) || !p.is_finite()) {
            continue;
        }
        let normal = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
        let screen = tri.map(|p| [k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy, p.z]);
        fill_triangle(&mut img, screen, shade(normal));
        for i in 0..3 {
            img.edges.push(ProjectedEdge { a: screen[i], b: screen[(i + 1) % 3] });
        }
    }
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat3;
    use crate::mesh::unit_cube;

    fn camera() -> CameraIntrinsics<f64> {
        CameraIntrinsics::new(800.0, 800.0, 320.0, 240.0).unwrap()
    }

    fn frontal(d: f64) -> Pose<f64> {
        Pose::new(Mat3::identity(), Vec3::new(0.0, 0.0, d))
    }

    fn centered_cube(side: f64) -> ModelTransform<f64> {
        ModelTransform { scale: side, translation: Vec3::splat(-0.5), ..Default::default() }
    }

    #[test]
    fn cube_behind_camera_draws_nothing() {
        let img = rasterize(&unit_cube(), &centered_cube(80.0), &frontal(-500.0), &camera(), 640, 480).unwrap();
        assert_eq!(img.coverage(), 0);
        assert!(img.edges.is_empty());
    }

    #[test]
    fn frontal_cube_footprint_matches_pinhole_area() {
        let img = rasterize(&unit_cube(), &centered_cube(80.0), &frontal(500.0), &camera(), 640, 480).unwrap();
        // the silhouette is the near face, 40 mm in front of the marker
        let side_px = 800.0 * 80.0 / 460.0;
        let expected = side_px * side_px;
        let got = img.coverage() as f64;
        assert!((got - expected).abs() <= 0.02 * expected, "{got} vs {expected}");
        // near face is lit head-on
        assert_eq!(img.color_at(320, 240), MODEL_COLOR);
    }

    #[test]
    fn nearer_triangle_wins() {
        let near = Vec3::new(0.0, -400.0, 0.0);
        let far = Vec3::new(0.0, -500.0, 0.0);
        // two large triangles facing the camera, overlapping on the axis
        let tri =
            |z: Vec3<f64>, s: f64| [Vec3::new(-s, 0.0, -s) + z, Vec3::new(0.0, 0.0, s) + z, Vec3::new(s, 0.0, -s) + z];
        let a = tri(near, 50.0);
        let b = tri(far, 80.0);
        let mesh = IndexedMesh::new([a, b].concat(), vec![[3, 4, 5], [0, 1, 2]]);
        let pose = Pose::new(Mat3::identity(), Vec3::zero());
        let img = rasterize(&mesh, &ModelTransform::default(), &pose, &camera(), 640, 480).unwrap();
        assert_eq!(img.depth[240 * 640 + 320], 400.0);
        let idx = (240 * 640 + 320) * 3;
        assert_eq!(&img.color[idx..idx + 3], &shade(Vec3::new(0.0, 0.0, -1.0)));
    }

    #[test]
    fn shared_edge_pixels_drawn_once() {
        // two triangles splitting a square along its diagonal cover it exactly once
        let z = 100.0;
        let v = |x: f64, y: f64| Vec3::new(x, y, z);
        let mesh = IndexedMesh::new(
            vec![v(-10.0, -10.0), v(10.0, -10.0), v(10.0, 10.0), v(-10.0, 10.0)],
            vec![[0, 1, 2], [0, 2, 3]],
        );
        let mut img = RenderedImage::empty(640, 480).unwrap();
        let k = camera();
        let scr = |p: Vec3<f64>| [k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy, p.z];
        let mut hits = vec![0u8; 640 * 480];
        for f in &mesh.faces {
            let mut single = RenderedImage::empty(640, 480).unwrap();
            fill_triangle(&mut single, f.map(|i| scr(mesh.vertices[i as usize])), [1, 1, 1]);
            for (h, d) in hits.iter_mut().zip(&single.depth) {
                *h += u8::from(d.is_finite());
            }
            fill_triangle(&mut img, f.map(|i| scr(mesh.vertices[i as usize])), [1, 1, 1]);
        }
        assert!(hits.iter().all(|&h| h <= 1));
        // 160x160 px square with integer edges
        assert_eq!(img.coverage(), 160 * 160);
    }

    #[test]
    fn depth_grows_with_distance() {
        let a = rasterize(&unit_cube(), &centered_cube(80.0), &frontal(500.0), &camera(), 640, 480).unwrap();
        let b = rasterize(&unit_cube(), &centered_cube(80.0), &frontal(550.0), &camera(), 640, 480).unwrap();
        assert!(b.coverage() < a.coverage());
    }

    #[test]
    fn zero_size_rejected() {
        assert_eq!(RenderedImage::empty(0, 5), Err(RenderError::InvalidDimensions(0, 5)));
    }
}
