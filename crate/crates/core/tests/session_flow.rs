use std::sync::Arc;

use arprint::linalg::Vec3;
use arprint::mesh::box_mesh;
use arprint::session::{
    apply_event, init_session, replay, CatalogEntry, MarkerObservation, Screen, SessionConfig, Sign, UIEvent,
};

fn catalog() -> Vec<CatalogEntry<f64>> {
    vec![
        CatalogEntry::new("a", Some("bar".into()), box_mesh(Vec3::zero(), Vec3::splat(10.0))),
        CatalogEntry::new("b", Some("mesh".into()), box_mesh(Vec3::zero(), Vec3::splat(40.0))),
    ]
}

#[test]
fn three_presses_rotate_forty_five_degrees() {
    let events = [
        UIEvent::GrantCamera,
        UIEvent::RotateX(Sign::Plus),
        UIEvent::RotateX(Sign::Plus),
        UIEvent::RotateX(Sign::Plus),
    ];
    let (s, notes) = replay(SessionConfig::default(), catalog(), &events).unwrap();
    assert!(notes.is_empty());
    assert!((s.transform.rot_x.to_degrees() - 45.0).abs() < 1e-12);
    let json = s.to_json();
    assert!((json["transform"]["rot_x_deg"].as_f64().unwrap() - 45.0).abs() < 1e-12);
}

#[test]
fn marker_yaw_drives_y_rotation_in_ar_only() {
    let s = init_session(SessionConfig::default(), catalog()).unwrap();
    let s = apply_event(&s, &UIEvent::GrantCamera).0;
    let seen = UIEvent::MarkerUpdate(Some(MarkerObservation { yaw: 0.7, confidence: 0.9 }));
    let (edit, note) = apply_event(&s, &seen);
    assert!(note.is_some());
    assert_eq!(edit.transform.rot_y, 0.0);
    let ar = apply_event(&s, &UIEvent::EnterAR).0;
    assert_eq!(ar.screen, Screen::ARView);
    let ar = apply_event(&ar, &seen).0;
    assert_eq!(ar.transform.rot_y, 0.7);
    assert!(ar.marker_visible);
    let lost = apply_event(&ar, &UIEvent::MarkerUpdate(None)).0;
    assert!(!lost.marker_visible);
    assert_eq!(lost.transform.rot_y, 0.7);
}

#[test]
fn upload_joins_the_catalog_and_is_selected() {
    let s = init_session(SessionConfig::default(), catalog()).unwrap();
    let s = apply_event(&s, &UIEvent::GrantCamera).0;
    let s = apply_event(&s, &UIEvent::OpenFolder).0;
    assert!(s.awaiting_upload);
    let mesh = Arc::new(box_mesh(Vec3::zero(), Vec3::splat(5.0)));
    let s = apply_event(&s, &UIEvent::UploadModel { name: "new".into(), mesh }).0;
    assert_eq!(s.catalog.len(), 3);
    assert_eq!(s.selected, Some(2));
    assert_eq!(s.selected_entry().unwrap().name, "new");
    assert!(!s.awaiting_upload);
}

#[test]
fn zoom_is_clamped_both_ways() {
    let mut s = apply_event(&init_session(SessionConfig::default(), catalog()).unwrap(), &UIEvent::GrantCamera).0;
    for _ in 0..20 {
        s = apply_event(&s, &UIEvent::ZoomIn).0;
    }
    assert_eq!(s.zoom, 4.0);
    for _ in 0..40 {
        s = apply_event(&s, &UIEvent::ZoomOut).0;
    }
    assert_eq!(s.zoom, 0.25);
    assert!((s.transform.scale - 0.25 * s.base_scale).abs() < 1e-12);
}

#[test]
fn state_json_is_identical_across_replays() {
    let events = vec![
        UIEvent::GrantCamera,
        UIEvent::NextModel,
        UIEvent::RotateZ(Sign::Minus),
        UIEvent::ZoomIn,
        UIEvent::EnterAR,
        UIEvent::MarkerUpdate(Some(MarkerObservation { yaw: -1.2, confidence: 0.8 })),
    ];
    let a = replay(SessionConfig::default(), catalog(), &events).unwrap().0.to_json().to_string();
    let b = replay(SessionConfig::default(), catalog(), &events).unwrap().0.to_json().to_string();
    assert_eq!(a, b);
}

#[test]
fn x_and_z_presses_commute() {
    let base = [UIEvent::GrantCamera];
    let xs = [UIEvent::RotateX(Sign::Plus), UIEvent::RotateX(Sign::Plus), UIEvent::RotateZ(Sign::Plus)];
    let orders: [[usize; 3]; 3] = [[0, 1, 2], [2, 0, 1], [0, 2, 1]];
    let results: Vec<_> = orders
        .iter()
        .map(|o| {
            let events: Vec<_> = base.iter().cloned().chain(o.iter().map(|&i| xs[i].clone())).collect();
            replay(SessionConfig::default(), catalog(), &events).unwrap().0.transform
        })
        .collect();
    assert!(results.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn cycling_the_whole_catalog_returns_to_the_start() {
    let mut s = apply_event(&init_session(SessionConfig::default(), catalog()).unwrap(), &UIEvent::GrantCamera).0;
    let start = s.selected;
    for _ in 0..s.catalog.len() {
        s = apply_event(&s, &UIEvent::NextModel).0;
    }
    assert_eq!(s.selected, start);
    s = apply_event(&s, &UIEvent::PrevModel).0;
    assert_eq!(s.selected, Some(s.catalog.len() - 1));
}
