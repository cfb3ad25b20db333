//! Application state machine: screens, model catalog, rotation and zoom
//! controls, and the coupling of marker yaw to the model's y rotation.
//!
//! [`apply_event`] is a total, pure function. Events that are not legal in
//! the current state leave it unchanged and come back with an
//! [`IgnoredEvent`] note.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::analysis::{fit_transform, ModelTransform};
use crate::linalg::Vec3;
use crate::mesh::IndexedMesh;
use crate::scalar::Real;
use crate::vision::Detection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScaleMode {
    /// Largest extent scaled to `target_extent`.
    FitToTarget,
    /// One model unit is one millimeter on the marker.
    TrueSize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error("invalid session config: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SessionConfig<T> {
    /// Radians per rotate button press.
    pub rotation_step: T,
    /// Factor per zoom button press.
    pub zoom_step: T,
    /// Allowed zoom factors relative to the base scale.
    pub zoom_bounds: [T; 2],
    /// Target largest extent in mm for [`ScaleMode::FitToTarget`].
    pub target_extent: T,
    pub scale_mode: ScaleMode,
    /// Physical side of the printed marker, mm.
    pub marker_side: T,
}

impl<T: Real> Default for SessionConfig<T> {
    fn default() -> Self {
        Self {
            rotation_step: T::PI() / T::lit(12.0),
            zoom_step: T::lit(1.25),
            zoom_bounds: [T::lit(0.25), T::lit(4.0)],
            target_extent: T::lit(80.0),
            scale_mode: ScaleMode::FitToTarget,
            marker_side: T::lit(80.0),
        }
    }
}

impl<T: Real> SessionConfig<T> {
    pub fn validate(&self) -> Result<(), SessionError> {
        let finite = [
            self.rotation_step,
            self.zoom_step,
            self.zoom_bounds[0],
            self.zoom_bounds[1],
            self.target_extent,
            self.marker_side,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(SessionError::InvalidConfig("all values must be finite"));
        }
        if !(self.zoom_step > T::one()) {
            return Err(SessionError::InvalidConfig("zoom_step must exceed 1"));
        }
        let [lo, hi] = self.zoom_bounds;
        if !(lo > T::zero() && lo <= T::one() && T::one() <= hi) {
            return Err(SessionError::InvalidConfig("zoom bounds must satisfy 0 < lo <= 1 <= hi"));
        }
        if !(self.target_extent > T::zero()) {
            return Err(SessionError::InvalidConfig("target_extent must be positive"));
        }
        if !(self.marker_side > T::zero()) {
            return Err(SessionError::InvalidConfig("marker_side must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Screen {
    CameraPermission,
    EditView,
    ARView,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry<T> {
    pub name: String,
    /// Folder the model came from, if any.
    pub category: Option<String>,
    pub mesh: Arc<IndexedMesh<T>>,
}

impl<T: Real> CatalogEntry<T> {
    pub fn new(name: impl Into<String>, category: Option<String>, mesh: IndexedMesh<T>) -> Self {
        Self { name: name.into(), category, mesh: Arc::new(mesh) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// What the session needs from a marker detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MarkerObservation<T> {
    pub yaw: T,
    pub confidence: T,
}

impl<T: Real> From<&Detection<T>> for MarkerObservation<T> {
    fn from(d: &Detection<T>) -> Self {
        Self { yaw: d.yaw, confidence: d.confidence }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum UIEvent<T> {
    GrantCamera,
    UploadModel { name: String, mesh: Arc<IndexedMesh<T>> },
    SelectCategory(String),
    NextModel,
    PrevModel,
    EnterAR,
    EnterEdit,
    RotateX(Sign),
    RotateZ(Sign),
    ZoomIn,
    ZoomOut,
    MarkerUpdate(Option<MarkerObservation<T>>),
    OpenFolder,
}

impl<T> UIEvent<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::GrantCamera => "GrantCamera",
            Self::UploadModel { .. } => "UploadModel",
            Self::SelectCategory(_) => "SelectCategory",
            Self::NextModel => "NextModel",
            Self::PrevModel => "PrevModel",
            Self::EnterAR => "EnterAR",
            Self::EnterEdit => "EnterEdit",
            Self::RotateX(_) => "RotateX",
            Self::RotateZ(_) => "RotateZ",
            Self::ZoomIn => "ZoomIn",
            Self::ZoomOut => "ZoomOut",
            Self::MarkerUpdate(_) => "MarkerUpdate",
            Self::OpenFolder => "OpenFolder",
        }
    }
}

/// Why an event left the state unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IgnoredEvent {
    pub event: &'static str,
    pub screen: Screen,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionState<T> {
    pub config: SessionConfig<T>,
    pub screen: Screen,
    pub catalog: Vec<CatalogEntry<T>>,
    pub selected: Option<usize>,
    pub transform: ModelTransform<T>,
    /// Scale of the selected model before zoom.
    pub base_scale: T,
    /// Zoom factor relative to `base_scale`, within the configured bounds.
    pub zoom: T,
    pub marker_visible: bool,
    pub last_yaw: T,
    pub awaiting_upload: bool,
}

impl<T: Real> SessionState<T> {
    pub fn selected_entry(&self) -> Option<&CatalogEntry<T>> {
        self.selected.and_then(|i| self.catalog.get(i))
    }

    /// Machine-stable JSON (sorted keys); angles are given in both radians
    /// and degrees. Meshes are summarized, not embedded.
    pub fn to_json(&self) -> Value {
        let f = |v: T| v.to_f64_lossless();
        let t = &self.transform;
        json!({
            "screen": self.screen,
            "catalog": self.catalog.iter().map(|e| json!({
                "name": e.name,
                "category": e.category,
                "vertex_count": e.mesh.vertices.len(),
                "face_count": e.mesh.faces.len(),
            })).collect::<Vec<_>>(),
            "selected": self.selected,
            "selected_name": self.selected_entry().map(|e| e.name.clone()),
            "transform": {
                "rot_x": f(t.rot_x),
                "rot_y": f(t.rot_y),
                "rot_z": f(t.rot_z),
                "rot_x_deg": f(t.rot_x).to_degrees(),
                "rot_y_deg": f(t.rot_y).to_degrees(),
                "rot_z_deg": f(t.rot_z).to_degrees(),
                "scale": f(t.scale),
                "translation": t.translation.to_array().map(f),
            },
            "base_scale": f(self.base_scale),
            "zoom": f(self.zoom),
            "marker_visible": self.marker_visible,
            "last_yaw": f(self.last_yaw),
            "last_yaw_deg": f(self.last_yaw).to_degrees(),
            "awaiting_upload": self.awaiting_upload,
            "config": {
                "rotation_step": f(self.config.rotation_step),
                "zoom_step": f(self.config.zoom_step),
                "zoom_bounds": self.config.zoom_bounds.map(f),
                "target_extent": f(self.config.target_extent),
                "scale_mode": self.config.scale_mode,
                "marker_side": f(self.config.marker_side),
            },
        })
    }
}

/// Base placement for a newly selected model: pivot at the bounding-box
/// center, scale per the configured mode.
pub fn base_transform<T: Real>(config: &SessionConfig<T>, mesh: &IndexedMesh<T>) -> ModelTransform<T> {
    let centered =
        ModelTransform { translation: mesh.bbox().map_or(Vec3::zero(), |b| -b.center()), ..Default::default() };
    match config.scale_mode {
        ScaleMode::TrueSize => centered,
        ScaleMode::FitToTarget => fit_transform(mesh, config.target_extent).unwrap_or(centered),
    }
}

/// Selects `index`, resetting x/z rotation and zoom. The y rotation belongs
/// to the marker and is kept.
fn select<T: Real>(s: &mut SessionState<T>, index: usize) {
    let base = base_transform(&s.config, &s.catalog[index].mesh);
    s.selected = Some(index);
    s.base_scale = base.scale;
    s.zoom = T::one();
    s.transform = ModelTransform { rot_y: s.transform.rot_y, ..base };
}

pub fn init_session<T: Real>(
    config: SessionConfig<T>,
    catalog: Vec<CatalogEntry<T>>,
) -> Result<SessionState<T>, SessionError> {
    config.validate()?;
    let mut s = SessionState {
        config,
        screen: Screen::CameraPermission,
        catalog,
        selected: None,
        transform: ModelTransform::default(),
        base_scale: T::one(),
        zoom: T::one(),
        marker_visible: false,
        last_yaw: T::zero(),
        awaiting_upload: false,
    };
    if !s.catalog.is_empty() {
        select(&mut s, 0);
    }
    Ok(s)
}

fn signed<T: Real>(step: T, sign: Sign) -> T {
    match sign {
        Sign::Plus => step,
        Sign::Minus => -step,
    }
}

/// Applies one event. Returns the new state and, when the event was not
/// legal here, a note explaining why nothing changed.
pub fn apply_event<T: Real>(state: &SessionState<T>, event: &UIEvent<T>) -> (SessionState<T>, Option<IgnoredEvent>) {
    let ignore = |reason| (state.clone(), Some(IgnoredEvent { event: event.kind(), screen: state.screen, reason }));
    if state.screen == Screen::CameraPermission && !matches!(event, UIEvent::GrantCamera) {
        return ignore("camera access has not been granted");
    }
    let mut s = state.clone();
    match event {
        UIEvent::GrantCamera => {
            if s.screen != Screen::CameraPermission {
                return ignore("camera access was already granted");
            }
            s.screen = Screen::EditView;
        }
        UIEvent::UploadModel { name, mesh } => {
            s.catalog.push(CatalogEntry { name: name.clone(), category: None, mesh: Arc::clone(mesh) });
            s.awaiting_upload = false;
            let last = s.catalog.len() - 1;
            select(&mut s, last);
        }
        UIEvent::SelectCategory(cat) => {
            let Some(i) = s.catalog.iter().position(|e| e.category.as_deref() == Some(cat.as_str())) else {
                return ignore("no model in that category");
            };
            s.awaiting_upload = false;
            select(&mut s, i);
        }
        UIEvent::NextModel | UIEvent::PrevModel => {
            let n = s.catalog.len();
            if n == 0 {
                return ignore("catalog is empty");
            }
            let next = match (s.selected, event) {
                (Some(i), UIEvent::NextModel) => (i + 1) % n,
                (Some(i), _) => (i + n - 1) % n,
                (None, UIEvent::NextModel) => 0,
                (None, _) => n - 1,
            };
            s.awaiting_upload = false;
            select(&mut s, next);
        }
        UIEvent::EnterAR => {
            if s.screen == Screen::ARView {
                return ignore("already in AR view");
            }
            s.screen = Screen::ARView;
        }
        UIEvent::EnterEdit => {
            if s.screen == Screen::EditView {
                return ignore("already in edit view");
            }
            s.screen = Screen::EditView;
            s.marker_visible = false;
        }
        UIEvent::RotateX(sign) | UIEvent::RotateZ(sign) => {
            if s.selected.is_none() {
                return ignore("no model selected");
            }
            let d = signed(s.config.rotation_step, *sign);
            match event {
                UIEvent::RotateX(_) => s.transform.rot_x += d,
                _ => s.transform.rot_z += d,
            }
        }
        UIEvent::ZoomIn | UIEvent::ZoomOut => {
            if s.selected.is_none() {
                return ignore("no model selected");
            }
            let [lo, hi] = s.config.zoom_bounds;
            let z = match event {
                UIEvent::ZoomIn => s.zoom * s.config.zoom_step,
                _ => s.zoom / s.config.zoom_step,
            };
            s.zoom = z.max(lo).min(hi);
            s.transform.scale = s.base_scale * s.zoom;
        }
        UIEvent::MarkerUpdate(obs) => {
            if s.screen != Screen::ARView {
                return ignore("marker updates are only used in AR view");
            }
            match obs {
                Some(o) => {
                    s.marker_visible = true;
                    s.last_yaw = o.yaw;
                    s.transform.rot_y = o.yaw;
                }
                None => s.marker_visible = false,
            }
        }
        UIEvent::OpenFolder => {
            s.selected = None;
            s.awaiting_upload = true;
        }
    }
    (s, None)
}

/// Left fold of [`apply_event`] from the initial state. Notes for ignored
/// events are returned alongside, in order.
pub fn replay<T: Real>(
    config: SessionConfig<T>,
    catalog: Vec<CatalogEntry<T>>,
    events: &[UIEvent<T>],
) -> Result<(SessionState<T>, Vec<IgnoredEvent>), SessionError> {
    let mut state = init_session(config, catalog)?;
    let mut notes = Vec::new();
    for e in events {
        let (next, note) = apply_event(&state, e);
        state = next;
        notes.extend(note);
    }
    Ok((state, notes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{box_mesh, unit_cube};

    fn cube_entry(name: &str, cat: &str, size: f64) -> CatalogEntry<f64> {
        CatalogEntry::new(name, Some(cat.into()), box_mesh(Vec3::zero(), Vec3::splat(size)))
    }

    fn seven() -> Vec<CatalogEntry<f64>> {
        let mut c: Vec<_> = (0..4).map(|i| cube_entry(&format!("bar{i}"), "bar", 10.0 + i as f64)).collect();
        c.extend((0..3).map(|i| cube_entry(&format!("mesh{i}"), "mesh", 20.0 + i as f64)));
        c
    }

    fn editing(catalog: Vec<CatalogEntry<f64>>) -> SessionState<f64> {
        let s = init_session(SessionConfig::default(), catalog).unwrap();
        apply_event(&s, &UIEvent::GrantCamera).0
    }

    #[test]
    fn init_states() {
        let s = init_session(SessionConfig::<f64>::default(), vec![]).unwrap();
        assert_eq!(s.screen, Screen::CameraPermission);
        assert_eq!(s.selected, None);
        let s = init_session(SessionConfig::default(), seven()).unwrap();
        assert_eq!(s.catalog.len(), 7);
        assert_eq!(s.config.zoom_step, 1.25);
        assert_eq!(s.selected, Some(0));
        assert_eq!(s.transform.scale, 8.0);
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = SessionConfig { zoom_step: 1.0, ..SessionConfig::<f64>::default() };
        assert!(init_session(bad, vec![]).is_err());
        let bad = SessionConfig { zoom_bounds: [2.0, 1.0], ..SessionConfig::<f64>::default() };
        assert!(init_session(bad, vec![]).is_err());
    }

    #[test]
    fn rotate_three_steps() {
        let mut s = editing(seven());
        for _ in 0..3 {
            s = apply_event(&s, &UIEvent::RotateX(Sign::Plus)).0;
        }
        assert!((s.transform.rot_x.to_degrees() - 45.0).abs() < 1e-12);
        assert_eq!(s.transform.rot_z, 0.0);
    }

    #[test]
    fn zoom_twice_and_clamp() {
        let mut s = editing(vec![CatalogEntry::new("c", None, box_mesh(Vec3::zero(), Vec3::splat(80.0)))]);
        assert_eq!(s.transform.scale, 1.0);
        s = apply_event(&s, &UIEvent::ZoomIn).0;
        s = apply_event(&s, &UIEvent::ZoomIn).0;
        assert_eq!(s.transform.scale, 1.5625);
        for _ in 0..50 {
            s = apply_event(&s, &UIEvent::ZoomOut).0;
        }
        assert_eq!(s.zoom, 0.25);
    }

    #[test]
    fn marker_updates_only_in_ar() {
        let s = editing(seven());
        let obs = MarkerObservation { yaw: 30f64.to_radians(), confidence: 0.9 };
        let (same, note) = apply_event(&s, &UIEvent::MarkerUpdate(Some(obs)));
        assert_eq!(same, s);
        assert!(note.is_some());

        let ar = apply_event(&s, &UIEvent::EnterAR).0;
        let (t, note) = apply_event(&ar, &UIEvent::MarkerUpdate(Some(obs)));
        assert!(note.is_none());
        assert!((t.transform.rot_y.to_degrees() - 30.0).abs() < 1e-12);
        assert!(t.marker_visible);

        let (lost, _) = apply_event(&t, &UIEvent::MarkerUpdate(None));
        assert!(!lost.marker_visible);
        assert_eq!(lost.transform, t.transform);
    }

    #[test]
    fn catalog_wraps() {
        let mut s = editing(seven());
        for _ in 0..6 {
            s = apply_event(&s, &UIEvent::NextModel).0;
        }
        assert_eq!(s.selected, Some(6));
        s = apply_event(&s, &UIEvent::NextModel).0;
        assert_eq!(s.selected, Some(0));
        s = apply_event(&s, &UIEvent::PrevModel).0;
        assert_eq!(s.selected, Some(6));
    }

    #[test]
    fn category_selects_first_tagged_model() {
        let s = editing(seven());
        let (t, _) = apply_event(&s, &UIEvent::SelectCategory("mesh".into()));
        assert_eq!(t.selected, Some(4));
        let (u, note) = apply_event(&s, &UIEvent::SelectCategory("vase".into()));
        assert_eq!(u, s);
        assert!(note.is_some());
    }

    #[test]
    fn camera_gate() {
        let s = init_session(SessionConfig::<f64>::default(), seven()).unwrap();
        for e in [UIEvent::EnterAR, UIEvent::ZoomIn, UIEvent::NextModel, UIEvent::OpenFolder] {
            let (t, note) = apply_event(&s, &e);
            assert_eq!(t, s);
            assert_eq!(note.unwrap().screen, Screen::CameraPermission);
        }
    }

    #[test]
    fn folder_then_upload() {
        let s = editing(seven());
        let (t, _) = apply_event(&s, &UIEvent::OpenFolder);
        assert_eq!(t.selected, None);
        assert!(t.awaiting_upload);
        let (z, note) = apply_event(&t, &UIEvent::ZoomIn);
        assert_eq!(z, t);
        assert!(note.is_some());
        let (u, _) = apply_event(&t, &UIEvent::UploadModel { name: "cube".into(), mesh: Arc::new(unit_cube()) });
        assert_eq!(u.selected, Some(7));
        assert!(!u.awaiting_upload);
        assert_eq!(u.transform.scale, 80.0);
    }

    #[test]
    fn replay_scenario() {
        let events = [
            UIEvent::<f64>::GrantCamera,
            UIEvent::UploadModel { name: "cube".into(), mesh: Arc::new(unit_cube()) },
            UIEvent::EnterAR,
            UIEvent::ZoomIn,
        ];
        let (s, notes) = replay(SessionConfig::default(), vec![], &events).unwrap();
        assert!(notes.is_empty());
        assert_eq!(s.screen, Screen::ARView);
        assert_eq!(s.transform.scale, 1.25 * s.base_scale);
        let (empty, _) = replay(SessionConfig::<f64>::default(), vec![], &[]).unwrap();
        assert_eq!(empty, init_session(SessionConfig::default(), vec![]).unwrap());
    }

    #[test]
    fn true_size_keeps_model_units() {
        let cfg = SessionConfig { scale_mode: ScaleMode::TrueSize, ..SessionConfig::<f64>::default() };
        let s = init_session(cfg, seven()).unwrap();
        assert_eq!(s.transform.scale, 1.0);
        assert_eq!(s.transform.translation, Vec3::splat(-5.0));
    }

    #[test]
    fn json_has_degrees_and_sorted_keys() {
        let s = editing(seven());
        let s = apply_event(&s, &UIEvent::RotateZ(Sign::Minus)).0;
        let v = s.to_json();
        assert!((v["transform"]["rot_z_deg"].as_f64().unwrap() + 15.0).abs() < 1e-12);
        assert_eq!(v["screen"], "EditView");
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.find("\"awaiting_upload\"").unwrap() < text.find("\"base_scale\"").unwrap());
    }
}
