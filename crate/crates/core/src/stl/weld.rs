use std::collections::HashMap;

use crate::linalg::Vec3;
use crate::mesh::IndexedMesh;
use crate::scalar::Real;

use super::TriangleSoup;

/// How coincident facet corners are merged into shared vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeldMode<T> {
    /// Corners merge only when all three coordinates are bitwise equal.
    Exact,
    /// Corners are snapped to the nearest point of a grid with the given
    /// spacing (mm) and merge per grid point. Round-number coordinates sit
    /// mid-cell; two points closer than the spacing can still snap apart
    /// when they straddle the halfway line between grid points.
    Tolerance(T),
}

impl<T: Real> Default for WeldMode<T> {
    fn default() -> Self {
        WeldMode::Tolerance(T::lit(1e-6))
    }
}

#[derive(Hash, PartialEq, Eq)]
enum Key {
    Bits([u64; 3]),
    Cell([i64; 3]),
}

fn key<T: Real>(v: Vec3<T>, mode: WeldMode<T>) -> Key {
    match mode {
        WeldMode::Tolerance(eps) if eps > T::zero() => {
            let cell = |c: T| (c / eps).round().to_i64().unwrap_or(if c < T::zero() { i64::MIN } else { i64::MAX });
            Key::Cell([cell(v.x), cell(v.y), cell(v.z)])
        }
        _ => Key::Bits(v.to_array().map(|c| c.to_f64_lossless().to_bits())),
    }
}

/// Merges the soup's facet corners into an indexed mesh.
///
/// Vertices are numbered in order of first appearance; the first corner to
/// land on a key supplies the vertex position. Faces keep the source
/// winding, and faces that collapse onto fewer than three distinct vertices
/// are kept so analysis can report them.
pub fn weld_vertices<T: Real>(soup: &TriangleSoup<T>, mode: WeldMode<T>) -> IndexedMesh<T> {
    let mut lookup: HashMap<Key, u32> = HashMap::with_capacity(soup.facets.len() / 2 + 3);
    let mut vertices = Vec::new();
    let faces = soup
        .facets
        .iter()
        .map(|f| {
            f.vertices.map(|v| {
                *lookup.entry(key(v, mode)).or_insert_with(|| {
                    vertices.push(v);
                    (vertices.len() - 1) as u32
                })
            })
        })
        .collect();
    IndexedMesh { vertices, faces }
}
