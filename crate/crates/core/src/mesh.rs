//! Indexed triangle meshes.

use serde::{Deserialize, Serialize};

use crate::linalg::Vec3;
use crate::scalar::Real;

/// Welded vertex/face representation of a model. Coordinates are millimeters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IndexedMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub faces: Vec<[u32; 3]>,
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Bbox<T> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Bbox<T> {
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3<T>>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        Some(it.fold(Bbox { min: first, max: first }, |b, p| Bbox { min: b.min.min(*p), max: b.max.max(*p) }))
    }

    pub fn extent(&self) -> Vec3<T> {
        self.max - self.min
    }

    pub fn center(&self) -> Vec3<T> {
        (self.min + self.max) * T::lit(0.5)
    }

    pub fn max_extent(&self) -> T {
        let e = self.extent();
        e.x.max(e.y).max(e.z)
    }

    pub fn union(&self, o: &Self) -> Self {
        Bbox { min: self.min.min(o.min), max: self.max.max(o.max) }
    }

    /// Separation between two boxes along one axis; zero when their
    /// projections onto that axis overlap or touch.
    pub fn axis_separation(&self, o: &Self, axis: usize) -> T {
        let gap = (o.min[axis] - self.max[axis]).max(self.min[axis] - o.max[axis]);
        gap.max(T::zero())
    }
}

impl<T: Real> IndexedMesh<T> {
    pub fn new(vertices: Vec<Vec3<T>>, faces: Vec<[u32; 3]>) -> Self {
        Self { vertices, faces }
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Checks that every face index refers to an existing vertex.
    pub fn indices_valid(&self) -> bool {
        let n = self.vertices.len();
        self.faces.iter().flatten().all(|&i| (i as usize) < n)
    }

    #[inline]
    pub fn triangle(&self, face: usize) -> [Vec3<T>; 3] {
        self.faces[face].map(|i| self.vertices[i as usize])
    }

    /// Bounding box of the vertices referenced by faces.
    pub fn bbox(&self) -> Option<Bbox<T>> {
        Bbox::from_points(self.faces.iter().flatten().map(|&i| &self.vertices[i as usize]))
    }

    /// Reverses the winding of every face.
    pub fn flipped(&self) -> Self {
        Self { vertices: self.vertices.clone(), faces: self.faces.iter().map(|&[a, b, c]| [a, c, b]).collect() }
    }

    pub fn map_vertices(&self, f: impl Fn(Vec3<T>) -> Vec3<T>) -> Self {
        Self { vertices: self.vertices.iter().map(|&v| f(v)).collect(), faces: self.faces.clone() }
    }

    /// Disjoint union; the other mesh's indices are shifted past ours.
    pub fn merged(&self, other: &Self) -> Self {
        let offset = self.vertices.len() as u32;
        let mut out = self.clone();
        out.vertices.extend_from_slice(&other.vertices);
        out.faces.extend(other.faces.iter().map(|f| f.map(|i| i + offset)));
        out
    }

    /// Renumbers vertices in order of first appearance in the face list and
    /// drops unreferenced ones. Two meshes that differ only by a vertex
    /// permutation have equal canonical forms.
    pub fn canonicalized(&self) -> Self {
        let mut remap = vec![u32::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        let faces = self
            .faces
            .iter()
            .map(|f| {
                f.map(|i| {
                    let slot = &mut remap[i as usize];
                    if *slot == u32::MAX {
                        *slot = vertices.len() as u32;
                        vertices.push(self.vertices[i as usize]);
                    }
                    *slot
                })
            })
            .collect();
        Self { vertices, faces }
    }

    pub fn cast<U: Real>(&self) -> IndexedMesh<U> {
        IndexedMesh { vertices: self.vertices.iter().map(|v| v.cast()).collect(), faces: self.faces.clone() }
    }
}

/// Closed axis-aligned box with outward-facing (counter-clockwise seen from
/// outside) triangles: 8 vertices, 12 faces.
pub fn box_mesh<T: Real>(min: Vec3<T>, max: Vec3<T>) -> IndexedMesh<T> {
    let v = |x: bool, y: bool, z: bool| {
        Vec3::new(if x { max.x } else { min.x }, if y { max.y } else { min.y }, if z { max.z } else { min.z })
    };
    let vertices = vec![
        v(false, false, false),
        v(true, false, false),
        v(true, true, false),
        v(false, true, false),
        v(false, false, true),
        v(true, false, true),
        v(true, true, true),
        v(false, true, true),
    ];
    let faces = vec![
        // -z
        [0, 2, 1],
        [0, 3, 2],
        // +z
        [4, 5, 6],
        [4, 6, 7],
        // -y
        [0, 1, 5],
        [0, 5, 4],
        // +y
        [3, 7, 6],
        [3, 6, 2],
        // -x
        [0, 4, 7],
        [0, 7, 3],
        // +x
        [1, 2, 6],
        [1, 6, 5],
    ];
    IndexedMesh { vertices, faces }
}

/// Unit cube `[0,1]³`, outward oriented.
pub fn unit_cube<T: Real>() -> IndexedMesh<T> {
    box_mesh(Vec3::zero(), Vec3::splat(T::one()))
}

/// Two coaxial closed boxes stacked along z with an axial gap between them,
/// as happens when stacked shapes in a model fail to touch.
pub fn stacked_boxes<T: Real>(gap: T) -> IndexedMesh<T> {
    let ten = T::lit(10.0);
    let lower = box_mesh(Vec3::new(-ten, -ten, T::zero()), Vec3::new(ten, ten, ten));
    let six = T::lit(6.0);
    let upper = box_mesh(Vec3::new(-six, -six, ten + gap), Vec3::new(six, six, ten + gap + T::lit(12.0)));
    lower.merged(&upper)
}

/// Closed surface of revolution about the y axis.
///
/// `profile` lists `(radius, height)` pairs from bottom to top; the first
/// and last radius must be zero (the poles). Faces are outward oriented.
pub fn lathe<T: Real>(profile: &[(T, T)], segments: usize) -> IndexedMesh<T> {
    assert!(profile.len() >= 3 && segments >= 3, "lathe needs a profile of 3+ points and 3+ segments");
    let rings = &profile[1..profile.len() - 1];
    let mut vertices = vec![Vec3::new(T::zero(), profile[0].1, T::zero())];
    for &(r, y) in rings {
        for j in 0..segments {
            let theta = T::TAU() * T::lit(j as f64) / T::lit(segments as f64);
            vertices.push(Vec3::new(r * theta.cos(), y, r * theta.sin()));
        }
    }
    let top = vertices.len() as u32;
    vertices.push(Vec3::new(T::zero(), profile[profile.len() - 1].1, T::zero()));

    let seg = segments as u32;
    let at = |ring: usize, j: u32| 1 + ring as u32 * seg + j % seg;
    let mut faces = Vec::new();
    for j in 0..seg {
        faces.push([0, at(0, j), at(0, j + 1)]);
    }
    for i in 0..rings.len() - 1 {
        for j in 0..seg {
            let (a, b, c, d) = (at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j));
            faces.push([a, d, c]);
            faces.push([a, c, b]);
        }
    }
    for j in 0..seg {
        faces.push([top, at(rings.len() - 1, j + 1), at(rings.len() - 1, j)]);
    }
    IndexedMesh { vertices, faces }
}

/// A pawn whose head floats `gap` mm above its body: two closed shells
/// that look like one piece on screen.
pub fn chess_surrogate<T: Real>(gap: T) -> IndexedMesh<T> {
    let p = |r: f64, y: f64| (T::lit(r), T::lit(y));
    let body = [p(0.0, 0.0), p(12.0, 0.0), p(12.0, 3.0), p(7.0, 6.0), p(5.0, 18.0), p(8.0, 20.0), p(0.0, 20.0)];
    let base = T::lit(20.0) + gap;
    let q = |r: f64, dy: f64| (T::lit(r), base + T::lit(dy));
    let head = [q(0.0, 0.0), q(4.0, 1.0), q(6.0, 4.0), q(4.0, 7.0), q(0.0, 8.0)];
    lathe(&body, 24).merged(&lathe(&head, 24))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_ignores_vertex_permutation() {
        let m = unit_cube::<f64>();
        let perm = [5u32, 2, 7, 0, 1, 6, 3, 4];
        let mut vertices = vec![Vec3::zero(); 8];
        for (old, &new) in perm.iter().enumerate() {
            vertices[new as usize] = m.vertices[old];
        }
        let faces = m.faces.iter().map(|f| f.map(|i| perm[i as usize])).collect();
        let permuted = IndexedMesh::new(vertices, faces);
        assert_ne!(permuted, m);
        assert_eq!(permuted.canonicalized(), m.canonicalized());
    }

    #[test]
    fn bbox_and_separation() {
        let b = unit_cube::<f64>().bbox().unwrap();
        assert_eq!(b.center(), Vec3::splat(0.5));
        let shifted = Bbox { min: Vec3::new(3.0, 0.5, 0.0), max: Vec3::new(4.0, 1.5, 1.0) };
        assert_eq!(b.axis_separation(&shifted, 0), 2.0);
        assert_eq!(b.axis_separation(&shifted, 1), 0.0);
    }

    #[test]
    fn lathe_is_closed_and_outward() {
        let profile = [(0.0, 0.0), (2.0, 0.0), (2.0, 5.0), (0.0, 5.0)];
        let m = lathe::<f64>(&profile, 16);
        assert_eq!(m.vertices.len(), 2 + 2 * 16);
        assert_eq!(m.faces.len(), 4 * 16);
        // V - E + F = 2 with E = 3F/2
        assert_eq!(m.vertices.len() as i64 - 3 * m.faces.len() as i64 / 2 + m.faces.len() as i64, 2);
        let vol = crate::analysis::signed_volume(&m);
        // regular 16-gon prism: (n/2) r² sin(2π/n) · h
        let expected = 8.0 * 4.0 * (std::f64::consts::TAU / 16.0).sin() * 5.0;
        assert!((vol - expected).abs() < 1e-9, "{vol} vs {expected}");
    }

    #[test]
    fn chess_surrogate_has_two_shells() {
        let m = chess_surrogate::<f64>(0.5);
        assert!(m.indices_valid());
        let b = m.bbox().unwrap();
        assert_eq!(b.max.y, 28.5);
    }
}
