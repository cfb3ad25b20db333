use serde::Serialize;

use crate::linalg::Vec3;
use crate::mesh::IndexedMesh;
use crate::scalar::Real;
use crate::stl::TriangleSoup;

/// Faces with a repeated vertex index, or whose area is below `eps_area` (mm²).
pub fn degenerate_faces<T: Real>(mesh: &IndexedMesh<T>, eps_area: T) -> Vec<usize> {
    let limit = eps_area * T::lit(2.0);
    (0..mesh.faces.len())
        .filter(|&i| {
            let [a, b, c] = mesh.faces[i];
            if a == b || b == c || a == c {
                return true;
            }
            area_vector(mesh.triangle(i)).norm() < limit
        })
        .collect()
}

/// Sum of signed tetrahedron volumes `det(v0, v1, v2) / 6` over all faces,
/// accumulated in face order. Equals the enclosed volume only for closed
/// meshes; negative for a closed mesh wound inside out.
pub fn signed_volume<T: Real>(mesh: &IndexedMesh<T>) -> T {
    let sum = (0..mesh.faces.len()).fold(T::zero(), |acc, i| {
        let [a, b, c] = mesh.triangle(i);
        acc + a.dot(b.cross(c))
    });
    sum / T::lit(6.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct NormalDeviation<T> {
    /// Largest angle between a stored facet normal and the normal implied by
    /// the facet's winding, in degrees.
    pub max_degrees: T,
    pub facets_checked: usize,
    /// The file carried no usable normals (all zero).
    pub normals_absent: bool,
}

/// Compares stored facet normals against the winding, skipping zero stored
/// normals and degenerate facets.
pub fn normal_deviation<T: Real>(soup: &TriangleSoup<T>) -> NormalDeviation<T> {
    let mut max = T::zero();
    let mut checked = 0;
    let mut any_stored = false;
    for f in &soup.facets {
        let Some(stored) = f.normal.normalized() else { continue };
        any_stored = true;
        let [a, b, c] = f.vertices;
        let Some(computed) = (b - a).cross(c - a).normalized() else { continue };
        checked += 1;
        let cos = stored.dot(computed).max(-T::one()).min(T::one());
        max = max.max(cos.acos().to_degrees());
    }
    NormalDeviation { max_degrees: max, facets_checked: checked, normals_absent: !any_stored }
}

/// Doubled-area normal of a triangle.
fn area_vector<T: Real>(t: [Vec3<T>; 3]) -> Vec3<T> {
    (t[1] - t[0]).cross(t[2] - t[0])
}
