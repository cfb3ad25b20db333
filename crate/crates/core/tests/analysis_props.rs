use proptest::prelude::*;

use arprint::analysis::{analyze, connected_components, edge_classification, fit_transform, signed_volume};
use arprint::linalg::Vec3;
use arprint::mesh::{box_mesh, chess_surrogate, stacked_boxes, unit_cube, IndexedMesh};
use arprint::stl::{parse_stl, weld_vertices, write_stl, TriangleSoup, WeldMode};

fn load(mesh: &IndexedMesh<f64>) -> (TriangleSoup<f64>, IndexedMesh<f64>) {
    let soup: TriangleSoup<f64> = parse_stl(&write_stl(mesh).unwrap()).unwrap();
    let welded = weld_vertices(&soup, WeldMode::default());
    (soup, welded)
}

fn random_faces() -> impl Strategy<Value = IndexedMesh<f64>> {
    proptest::collection::vec((0u32..12, 0u32..12, 0u32..12), 1..40).prop_map(|fs| IndexedMesh {
        vertices: (0..12).map(|i| Vec3::new(i as f64, (i * i) as f64, (i % 3) as f64)).collect(),
        faces: fs.into_iter().map(|(a, b, c)| [a, b, c]).collect(),
    })
}

proptest! {
    #[test]
    fn every_face_side_is_counted_once(mesh in random_faces()) {
        let r = edge_classification(&mesh);
        let sides: usize = mesh.faces.iter().map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])].iter().filter(|(a, b)| a != b).count()).sum();
        let counted = 2 * r.interior_edges + r.boundary_edges.len() + r.nonmanifold_edges.iter().map(|e| e.faces).sum::<usize>();
        prop_assert_eq!(sides, counted);
        prop_assert!(r.boundary_edges.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn component_labels_are_dense(mesh in random_faces()) {
        let c = connected_components(&mesh);
        prop_assert_eq!(c.face_labels.len(), mesh.faces.len());
        let mut seen = vec![false; c.count];
        for &l in &c.face_labels {
            seen[l as usize] = true;
        }
        prop_assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn volume_ignores_translation(dx in -500.0f64..500.0, dy in -500.0f64..500.0, dz in -500.0f64..500.0) {
        let cube = box_mesh(Vec3::zero(), Vec3::new(3.0, 4.0, 5.0));
        let moved = cube.map_vertices(|p| p + Vec3::new(dx, dy, dz));
        // triple products near 1e8 mm³ cancel down to 60; allow their rounding
        let bound = 64.0 * f64::EPSILON * (dx.abs() + dy.abs() + dz.abs() + 5.0).powi(3);
        prop_assert!((signed_volume(&moved) - 60.0).abs() <= bound);
    }

    #[test]
    fn fit_brings_largest_extent_to_target(sx in 0.5f64..300.0, sy in 0.5f64..300.0, sz in 0.5f64..300.0, target in 1.0f64..200.0) {
        let m = box_mesh(Vec3::new(7.0, -3.0, 1.0), Vec3::new(7.0 + sx, -3.0 + sy, 1.0 + sz));
        let t = fit_transform(&m, target).unwrap();
        let placed = m.map_vertices(|p| t.apply(p));
        let b = placed.bbox().unwrap();
        prop_assert!((b.max_extent() - target).abs() < 1e-9 * target);
        prop_assert!(b.center().norm() < 1e-9 * target);
    }
}

#[test]
fn flipping_negates_volume_and_is_flagged() {
    let cube = box_mesh(Vec3::zero(), Vec3::splat(20.0));
    assert_eq!(signed_volume(&cube.flipped()), -8000.0);
    let (soup, welded) = load(&cube.flipped());
    let r = analyze(&welded, &soup);
    assert!(r.watertight && r.orientation_inverted);
}

#[test]
fn stacked_gap_reports_axial_separation() {
    let (soup, welded) = load(&stacked_boxes(0.5));
    let r = analyze(&welded, &soup);
    assert_eq!(r.component_count, 2);
    let sep = r.min_component_separation.unwrap();
    assert_eq!(sep[0], 0.0);
    assert_eq!(sep[1], 0.0);
    assert!((sep[2] - 0.5).abs() < 1e-6, "{sep:?}");
}

#[test]
fn chess_surrogate_is_two_closed_shells() {
    let (soup, welded) = load(&chess_surrogate(0.5));
    let r = analyze(&welded, &soup);
    assert!(r.watertight, "each shell is closed");
    assert!(!r.passes());
    assert_eq!(r.component_count, 2);
    assert!(r.signed_volume > 0.0);
}

#[test]
fn report_json_has_sorted_stable_keys() {
    let (soup, welded) = load(&unit_cube());
    let a = analyze(&welded, &soup).to_json().to_string();
    let b = analyze(&welded, &soup).to_json().to_string();
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(v["watertight"], true);
    assert_eq!(v["component_count"], 1);
}

#[test]
fn f32_analysis_matches_f64() {
    let m64 = chess_surrogate::<f64>(0.5);
    let m32 = m64.cast::<f32>();
    assert_eq!(edge_classification(&m32), edge_classification(&m64));
    assert_eq!(connected_components(&m32).count, connected_components(&m64).count);
    let (v32, v64) = (signed_volume(&m32) as f64, signed_volume(&m64));
    assert!((v32 - v64).abs() / v64 < 1e-4);
}
