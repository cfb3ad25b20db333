//! Loading and saving of the on-disk formats the commands exchange.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;

use arprint::image::Frame;
use arprint::session::CatalogEntry;
use arprint::stl::{parse_stl, weld_vertices, TriangleSoup, WeldMode};
use arprint::vision::{CameraIntrinsics, MarkerPattern};
use arprint::{Intrinsics, Mesh, Soup};

pub fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

pub fn load_soup(path: &Path) -> Result<Soup> {
    let bytes = read(path)?;
    parse_stl(&bytes).with_context(|| format!("{} is not a usable STL file", path.display()))
}

pub fn weld(soup: &TriangleSoup<f64>, eps: f64) -> Result<Mesh> {
    let mode = if eps == 0.0 {
        WeldMode::Exact
    } else if eps > 0.0 && eps.is_finite() {
        WeldMode::Tolerance(eps)
    } else {
        bail!("weld tolerance must be a non-negative number, got {eps}");
    };
    Ok(weld_vertices(soup, mode))
}

pub fn load_mesh(path: &Path) -> Result<Mesh> {
    weld(&load_soup(path)?, 1e-6)
}

pub fn load_frame(path: &Path) -> Result<Frame> {
    Frame::from_pgm(&read(path)?).with_context(|| format!("{} is not a usable PGM frame", path.display()))
}

pub fn load_pattern(path: &Path) -> Result<MarkerPattern> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| anyhow!("{} is not a text pattern file", path.display()))?;
    MarkerPattern::from_arpat(&text).with_context(|| format!("cannot load pattern {}", path.display()))
}

const DISTORTION_KEYS: [&str; 5] = ["k1", "k2", "k3", "p1", "p2"];

/// Pinhole intrinsics from `{"fx", "fy", "cx", "cy"}`. Distortion given as a
/// `distortion` array or as `k1`..`p2` fields must be zero.
pub fn parse_intrinsics(text: &str) -> Result<Intrinsics> {
    let v: Value = serde_json::from_str(text).context("intrinsics are not valid JSON")?;
    let obj = v.as_object().ok_or_else(|| anyhow!("intrinsics must be a JSON object"))?;
    let num = |key: &str| -> Result<f64> {
        obj.get(key).and_then(Value::as_f64).ok_or_else(|| anyhow!("intrinsics need a numeric `{key}`"))
    };
    let mut distortion = Vec::new();
    if let Some(d) = obj.get("distortion") {
        let arr = d.as_array().ok_or_else(|| anyhow!("`distortion` must be an array of numbers"))?;
        for c in arr {
            distortion.push(c.as_f64().ok_or_else(|| anyhow!("`distortion` must be an array of numbers"))?);
        }
    }
    for key in DISTORTION_KEYS {
        if obj.contains_key(key) {
            distortion.push(num(key)?);
        }
    }
    if distortion.iter().any(|&c| c != 0.0) {
        bail!("lens distortion is not supported; undistort frames first or set all distortion coefficients to 0");
    }
    Ok(CameraIntrinsics::new(num("fx")?, num("fy")?, num("cx")?, num("cy")?)?)
}

pub fn load_intrinsics(path: &Path) -> Result<Intrinsics> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes).map_err(|_| anyhow!("{} is not UTF-8 JSON", path.display()))?;
    parse_intrinsics(&text).with_context(|| format!("cannot load intrinsics {}", path.display()))
}

fn is_stl(path: &Path) -> bool {
    path.is_file() && path.extension().is_some_and(|e| e.eq_ignore_ascii_case("stl"))
}

fn sorted_entries(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        out.push(entry?.path());
    }
    out.sort();
    Ok(out)
}

/// STL files in the immediate subfolders of `dir`, in name order; the
/// subfolder name becomes the category and the file stem the model name.
pub fn load_catalog(dir: &Path) -> Result<Vec<CatalogEntry<f64>>> {
    let mut catalog = Vec::new();
    for sub in sorted_entries(dir)?.into_iter().filter(|p| p.is_dir()) {
        let category = sub.file_name().map(|n| n.to_string_lossy().into_owned());
        for file in sorted_entries(&sub)?.into_iter().filter(|p| is_stl(p)) {
            let name = file.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            catalog.push(CatalogEntry::new(name, category.clone(), load_mesh(&file)?));
        }
    }
    Ok(catalog)
}
