use crate::linalg::Vec3;
use crate::mesh::IndexedMesh;
use crate::scalar::Real;

use super::{check_finite, Facet, SourceFormat, StlError, TriangleSoup};

pub const BINARY_HEADER_LEN: usize = 80;
pub const FACET_RECORD_LEN: usize = 50;

const DEFAULT_HEADER: &[u8] = b"binary STL exported by arprint";

pub(super) fn declared_count(bytes: &[u8]) -> Option<u32> {
    let raw = bytes.get(BINARY_HEADER_LEN..BINARY_HEADER_LEN + 4)?;
    Some(u32::from_le_bytes(raw.try_into().ok()?))
}

pub(super) fn expected_len(count: u32) -> u64 {
    (BINARY_HEADER_LEN as u64 + 4) + FACET_RECORD_LEN as u64 * u64::from(count)
}

fn read_vec3<T: Real>(rec: &[u8]) -> Vec3<T> {
    let f = |i: usize| {
        let v = f32::from_le_bytes(rec[4 * i..4 * i + 4].try_into().unwrap());
        T::lit(f64::from(v))
    };
    Vec3::new(f(0), f(1), f(2))
}

pub(super) fn parse<T: Real>(bytes: &[u8], count: usize) -> Result<TriangleSoup<T>, StlError> {
    if count == 0 {
        return Err(StlError::EmptyModel);
    }
    let header = &bytes[..BINARY_HEADER_LEN];
    let end = header.iter().rposition(|&b| b != 0 && b != b' ').map_or(0, |p| p + 1);
    let name = String::from_utf8_lossy(&header[..end]).into_owned();

    let facets: Vec<Facet<T>> = bytes[BINARY_HEADER_LEN + 4..]
        .chunks_exact(FACET_RECORD_LEN)
        .map(|rec| {
            let normal = read_vec3::<T>(&rec[0..12]);
            Facet {
                normal: if normal.is_finite() { normal } else { Vec3::zero() },
                vertices: [read_vec3(&rec[12..24]), read_vec3(&rec[24..36]), read_vec3(&rec[36..48])],
            }
        })
        .collect();
    debug_assert_eq!(facets.len(), count);
    check_finite(&facets)?;
    Ok(TriangleSoup { facets, name, source_format: SourceFormat::Binary })
}

/// Serializes a mesh as little-endian binary STL with a default header.
pub fn write_stl<T: Real>(mesh: &IndexedMesh<T>) -> Result<Vec<u8>, StlError> {
    write_stl_with_header(mesh, DEFAULT_HEADER)
}

/// Like [`write_stl`], with the first 80 bytes of `header` (zero padded) as header.
///
/// Each record stores the unit normal of the face computed from its winding,
/// or the zero vector for a degenerate face.
pub fn write_stl_with_header<T: Real>(mesh: &IndexedMesh<T>, header: &[u8]) -> Result<Vec<u8>, StlError> {
    let count = u32::try_from(mesh.faces.len()).map_err(|_| StlError::TooManyFacets { count: mesh.faces.len() })?;
    let mut out = Vec::with_capacity(expected_len(count) as usize);
    let mut head = [0u8; BINARY_HEADER_LEN];
    let n = header.len().min(BINARY_HEADER_LEN);
    head[..n].copy_from_slice(&header[..n]);
    out.extend_from_slice(&head);
    out.extend_from_slice(&count.to_le_bytes());

    let put = |out: &mut Vec<u8>, v: Vec3<f64>| {
        for c in v.to_array() {
            out.extend_from_slice(&(c as f32).to_le_bytes());
        }
    };
    for face in 0..mesh.faces.len() {
        let [a, b, c] = mesh.triangle(face).map(|v| v.cast::<f64>());
        let normal = (b - a).cross(c - a).normalized().unwrap_or_else(Vec3::zero);
        put(&mut out, normal);
        put(&mut out, a);
        put(&mut out, b);
        put(&mut out, c);
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    Ok(out)
}
