//! Replay scripts: a JSON array of events tagged by `"type"`.
//!
//! ```json
//! [
//!   {"type": "GrantCamera"},
//!   {"type": "UploadModel", "file": "cube.stl", "name": "cube"},
//!   {"type": "SelectCategory", "name": "bar"},
//!   {"type": "RotateX", "sign": "+"},
//!   {"type": "MarkerUpdate", "detection": {"yaw_deg": 30, "confidence": 0.9}},
//!   {"type": "MarkerUpdate", "detection": null},
//!   {"type": "EnterAR"}
//! ]
//! ```
//!
//! The remaining events (`NextModel`, `PrevModel`, `EnterEdit`, `ZoomIn`,
//! `ZoomOut`, `OpenFolder`, `RotateZ`) take no fields except `sign` for
//! `RotateZ`. Upload paths are relative to the catalog folder.

use std::path::Path;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use arprint::session::{MarkerObservation, Sign, UIEvent};

use crate::files::load_mesh;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SignArg {
    Num(i64),
    Text(String),
}

impl SignArg {
    fn sign(&self) -> Result<Sign> {
        match self {
            Self::Num(1) => Ok(Sign::Plus),
            Self::Num(-1) => Ok(Sign::Minus),
            Self::Text(s) if s == "+" || s == "plus" => Ok(Sign::Plus),
            Self::Text(s) if s == "-" || s == "minus" => Ok(Sign::Minus),
            other => Err(anyhow!("rotation sign must be \"+\", \"-\", 1 or -1, got {other:?}")),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Observation {
    yaw: Option<f64>,
    yaw_deg: Option<f64>,
    confidence: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type")]
enum ScriptEvent {
    GrantCamera,
    UploadModel { file: String, name: Option<String> },
    SelectCategory { name: String },
    NextModel,
    PrevModel,
    EnterAR,
    EnterEdit,
    RotateX { sign: SignArg },
    RotateZ { sign: SignArg },
    ZoomIn,
    ZoomOut,
    MarkerUpdate { detection: Option<Observation> },
    OpenFolder,
}

fn convert(event: ScriptEvent, upload_root: &Path) -> Result<UIEvent<f64>> {
    Ok(match event {
        ScriptEvent::GrantCamera => UIEvent::GrantCamera,
        ScriptEvent::UploadModel { file, name } => {
            let path = upload_root.join(&file);
            if !path.is_file() {
                bail!("uploaded model {file} not found under {}", upload_root.display());
            }
            let mesh = load_mesh(&path)?;
            let name = name.unwrap_or_else(|| {
                Path::new(&file).file_stem().map_or(file.clone(), |s| s.to_string_lossy().into_owned())
            });
            UIEvent::UploadModel { name, mesh: Arc::new(mesh) }
        }
        ScriptEvent::SelectCategory { name } => UIEvent::SelectCategory(name),
        ScriptEvent::NextModel => UIEvent::NextModel,
        ScriptEvent::PrevModel => UIEvent::PrevModel,
        ScriptEvent::EnterAR => UIEvent::EnterAR,
        ScriptEvent::EnterEdit => UIEvent::EnterEdit,
        ScriptEvent::RotateX { sign } => UIEvent::RotateX(sign.sign()?),
        ScriptEvent::RotateZ { sign } => UIEvent::RotateZ(sign.sign()?),
        ScriptEvent::ZoomIn => UIEvent::ZoomIn,
        ScriptEvent::ZoomOut => UIEvent::ZoomOut,
        ScriptEvent::MarkerUpdate { detection } => UIEvent::MarkerUpdate(match detection {
            None => None,
            Some(o) => {
                let yaw = match (o.yaw, o.yaw_deg) {
                    (Some(r), None) => r,
                    (None, Some(d)) => d.to_radians(),
                    _ => bail!("MarkerUpdate detection needs exactly one of `yaw` or `yaw_deg`"),
                };
                if !yaw.is_finite() {
                    bail!("MarkerUpdate yaw must be finite");
                }
                Some(MarkerObservation { yaw, confidence: o.confidence.unwrap_or(1.0) })
            }
        }),
        ScriptEvent::OpenFolder => UIEvent::OpenFolder,
    })
}

/// Parses a script; uploads are loaded from `upload_root`.
pub fn parse_script(text: &str, upload_root: &Path) -> Result<Vec<UIEvent<f64>>> {
    let raw: Vec<ScriptEvent> = serde_json::from_str(text).context("malformed replay script")?;
    raw.into_iter().enumerate().map(|(i, e)| convert(e, upload_root).with_context(|| format!("event {i}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_events() {
        let events = parse_script(
            r#"[{"type":"GrantCamera"},{"type":"RotateX","sign":"+"},{"type":"RotateZ","sign":-1},
                {"type":"MarkerUpdate","detection":{"yaw_deg":30}},{"type":"MarkerUpdate","detection":null},
                {"type":"MarkerUpdate"}]"#,
            Path::new("."),
        )
        .unwrap();
        assert_eq!(events.len(), 6);
        assert_eq!(events[1], UIEvent::RotateX(Sign::Plus));
        assert_eq!(events[2], UIEvent::RotateZ(Sign::Minus));
        match &events[3] {
            UIEvent::MarkerUpdate(Some(o)) => assert!((o.yaw.to_degrees() - 30.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert_eq!(events[4], UIEvent::MarkerUpdate(None));
        assert_eq!(events[5], UIEvent::MarkerUpdate(None));
    }

    #[test]
    fn rejects_bad_scripts() {
        let root = Path::new(".");
        assert!(parse_script("{}", root).is_err());
        assert!(parse_script(r#"[{"type":"Jump"}]"#, root).is_err());
        assert!(parse_script(r#"[{"type":"RotateX","sign":2}]"#, root).is_err());
        assert!(parse_script(r#"[{"type":"UploadModel","file":"missing-model.stl"}]"#, root).is_err());
        assert!(parse_script(r#"[{"type":"MarkerUpdate","detection":{"yaw":1,"yaw_deg":2}}]"#, root).is_err());
    }
}
