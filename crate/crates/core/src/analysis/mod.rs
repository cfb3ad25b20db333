//! Printability diagnostics: gaps (boundary edges), non-manifold edges,
//! stray shells, orientation and size.

mod components;
mod edges;
mod geometry;
mod transform;

use serde::Serialize;
use thiserror::Error;

use crate::mesh::{Bbox, IndexedMesh};
use crate::scalar::Real;
use crate::stl::TriangleSoup;

pub use components::{connected_components, Components};
pub use edges::{boundary_loops, edge_classification, BoundaryLoop, Edge, EdgeReport, NonManifoldEdge};
pub use geometry::{degenerate_faces, normal_deviation, signed_volume, NormalDeviation};
pub use transform::{fit_transform, ModelTransform};

/// Area below which a face counts as degenerate, mm².
pub const DEFAULT_EPS_AREA: f64 = 1e-8;

pub const CONNECTIVITY_RULE: &str = "faces sharing at least one welded vertex belong to the same component";
pub const ALIGNMENT_METRIC: &str =
    "minimum axis-aligned separation between component bounding boxes, per axis (0 where projections overlap)";

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("model bounding box has zero extent on every axis")]
    DegenerateExtent,
    #[error("target extent must be positive and finite")]
    InvalidTargetExtent,
}

/// Summary of everything that makes a model unprintable or suspicious.
///
/// Serialized (via `serde_json::Value`, so keys come out sorted) as the
/// `--json` output of `arprint inspect`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct PrintabilityReport<T> {
    /// No boundary edges, no non-manifold edges, and every interior edge
    /// traversed in opposite directions by its two faces.
    pub watertight: bool,
    pub vertex_count: usize,
    pub face_count: usize,
    pub interior_edge_count: usize,
    pub boundary_edge_count: usize,
    pub boundary_loops: Vec<BoundaryLoop>,
    pub nonmanifold_edges: Vec<NonManifoldEdge>,
    pub nonmanifold_edge_count: usize,
    pub misoriented_edge_count: usize,
    pub orientation_consistent: bool,
    pub component_count: usize,
    /// More than one shell in the file.
    pub multi_shell: bool,
    pub connectivity_rule: &'static str,
    pub component_bboxes: Vec<Bbox<T>>,
    /// Smallest gap between any two components along x, y and z.
    pub min_component_separation: Option<[T; 3]>,
    pub alignment_metric: &'static str,
    pub degenerate_face_indices: Vec<usize>,
    /// mm³; meaningful as the enclosed volume only when watertight.
    pub signed_volume: T,
    /// Watertight but wound inside out.
    pub orientation_inverted: bool,
    pub max_normal_deviation_deg: T,
    pub normals_absent: bool,
    pub bbox: Option<Bbox<T>>,
}

impl<T: Real> PrintabilityReport<T> {
    /// Watertight and made of a single shell.
    pub fn passes(&self) -> bool {
        self.watertight && self.component_count == 1
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

pub fn analyze<T: Real>(mesh: &IndexedMesh<T>, soup: &TriangleSoup<T>) -> PrintabilityReport<T> {
    analyze_with(mesh, soup, T::lit(DEFAULT_EPS_AREA))
}

/// Runs every check on a mesh welded from `soup`.
pub fn analyze_with<T: Real>(mesh: &IndexedMesh<T>, soup: &TriangleSoup<T>, eps_area: T) -> PrintabilityReport<T> {
    let edges = edge_classification(mesh);
    let loops = boundary_loops(&edges);
    let comps = connected_components(mesh);
    let watertight =
        edges.boundary_edges.is_empty() && edges.nonmanifold_edges.is_empty() && edges.orientation_consistent();
    let volume = signed_volume(mesh);
    let normals = normal_deviation(soup);

    let mut component_bboxes: Vec<Option<Bbox<T>>> = vec![None; comps.count];
    for (face, &label) in mesh.faces.iter().zip(&comps.face_labels) {
        for &i in face {
            let v = mesh.vertices[i as usize];
            let slot = &mut component_bboxes[label as usize];
            *slot = Some(match slot {
                Some(b) => Bbox { min: b.min.min(v), max: b.max.max(v) },
                None => Bbox { min: v, max: v },
            });
        }
    }
    let component_bboxes: Vec<Bbox<T>> = component_bboxes.into_iter().flatten().collect();
    let mut min_sep: Option<[T; 3]> = None;
    for (i, a) in component_bboxes.iter().enumerate() {
        for b in &component_bboxes[i + 1..] {
            let sep = [0, 1, 2].map(|axis| a.axis_separation(b, axis));
            min_sep = Some(match min_sep {
                Some(m) => [0, 1, 2].map(|k| m[k].min(sep[k])),
                None => sep,
            });
        }
    }

    PrintabilityReport {
        watertight,
        vertex_count: mesh.vertices.len(),
        face_count: mesh.faces.len(),
        interior_edge_count: edges.interior_edges,
        boundary_edge_count: edges.boundary_edges.len(),
        boundary_loops: loops,
        nonmanifold_edge_count: edges.nonmanifold_edges.len(),
        nonmanifold_edges: edges.nonmanifold_edges.clone(),
        misoriented_edge_count: edges.misoriented_edges.len(),
        orientation_consistent: edges.orientation_consistent(),
        component_count: comps.count,
        multi_shell: comps.count > 1,
        connectivity_rule: CONNECTIVITY_RULE,
        component_bboxes,
        min_component_separation: min_sep,
        alignment_metric: ALIGNMENT_METRIC,
        degenerate_face_indices: degenerate_faces(mesh, eps_area),
        signed_volume: volume,
        orientation_inverted: watertight && volume < T::zero(),
        max_normal_deviation_deg: normals.max_degrees,
        normals_absent: normals.normals_absent,
        bbox: mesh.bbox(),
    }
}
