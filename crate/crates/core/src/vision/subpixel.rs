use crate::image::Frame;
use crate::linalg::Point2;

/// Half-length (px) of the luminance profile taken across each edge.
const REACH: f64 = 3.0;
const PROFILE_STEP: f64 = 0.25;
/// Minimum bright/dark difference for a profile to be used.
const MIN_CONTRAST: f64 = 20.0;
/// Refined corners further than this from the rough ones are distrusted.
const MAX_SHIFT: f64 = 2.0;

/// Total-least-squares line through `pts` as (point on line, unit direction).
fn fit_line(pts: &[Point2<f64>]) -> Option<(Point2<f64>, [f64; 2])> {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in pts {
        let (dx, dy) = (p.x - cx, p.y - cy);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = [angle.cos(), angle.sin()];
    dir[0].is_finite().then_some((Point2::new(cx, cy), dir))
}

fn intersect(a: (Point2<f64>, [f64; 2]), b: (Point2<f64>, [f64; 2])) -> Option<Point2<f64>> {
    let (p, d) = a;
    let (q, e) = b;
    let den = d[0] * e[1] - d[1] * e[0];
    if den.abs() < 1e-9 {
        return None;
    }
    let t = ((q.x - p.x) * e[1] - (q.y - p.y) * e[0]) / den;
    Some(Point2::new(p.x + t * d[0], p.y + t * d[1]))
}

/// Edge position along the outward normal from a luminance profile taken
/// from the dark inside to the bright outside.
///
/// The darkness profile, normalized to 1 inside and 0 outside, integrates
/// to the distance from the profile start to the edge. Unlike the
/// mid-level crossing this has no bias for area-sampled edges at
/// fractional positions. Profiles that cross the mid level more than once
/// are rejected as clutter.
fn edge_offset(frame: &Frame, base: Point2<f64>, normal: [f64; 2]) -> Option<f64> {
    let steps = (2.0 * REACH / PROFILE_STEP) as usize;
    let mut profile = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let s = -REACH + i as f64 * PROFILE_STEP;
        profile.push(frame.sample_bilinear(base.x + s * normal[0], base.y + s * normal[1])?);
    }
    let band = (1.0 / PROFILE_STEP) as usize;
    let inside = profile[..band].iter().sum::<f64>() / band as f64;
    let outside = profile[profile.len() - band..].iter().sum::<f64>() / band as f64;
    if outside - inside < MIN_CONTRAST {
        return None;
    }
    let mid = 0.5 * (inside + outside);
    if profile.windows(2).filter(|w| (w[0] < mid) != (w[1] < mid)).count() != 1 {
        return None;
    }
    let dark: Vec<f64> = profile.iter().map(|v| (outside - v) / (outside - inside)).collect();
    let area = dark.windows(2).map(|w| 0.5 * (w[0] + w[1]) * PROFILE_STEP).sum::<f64>();
    Some(-REACH + area)
}

/// Moves the sides of a dark quad on a bright surround onto the mid-level
/// luminance crossing and re-intersects them. Returns the input unchanged
/// when any side lacks support or a corner would move too far.
pub fn refine_quad_edges(frame: &Frame, corners: &[Point2<f64>; 4]) -> [Point2<f64>; 4] {
    let cx = corners.iter().map(|p| p.x).sum::<f64>() / 4.0;
    let cy = corners.iter().map(|p| p.y).sum::<f64>() / 4.0;
    let mut lines = Vec::with_capacity(4);
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        let len = a.distance(b);
        if len < 8.0 {
            return *corners;
        }
        let d = [(b.x - a.x) / len, (b.y - a.y) / len];
        let mut n = [-d[1], d[0]];
        let mid = Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
        if n[0] * (mid.x - cx) + n[1] * (mid.y - cy) < 0.0 {
            n = [-n[0], -n[1]];
        }
        // stay clear of the corners, where the profile sees two edges
        let margin = (0.15 * len).max(REACH + 1.0);
        let count = (len - 2.0 * margin).floor() as usize;
        let pts: Vec<Point2<f64>> = (0..=count)
            .filter_map(|j| {
                let t = margin + j as f64;
                let base = Point2::new(a.x + t * d[0], a.y + t * d[1]);
                edge_offset(frame, base, n).map(|s| Point2::new(base.x + s * n[0], base.y + s * n[1]))
            })
            .collect();
        if pts.len() < 4 {
            return *corners;
        }
        match fit_line(&pts) {
            Some(l) => lines.push(l),
            None => return *corners,
        }
    }
    let mut out = *corners;
    for i in 0..4 {
        // corner i joins side i-1 and side i
        let Some(p) = intersect(lines[(i + 3) % 4], lines[i]) else { return *corners };
        if p.distance(corners[i]) > MAX_SHIFT {
            return *corners;
        }
        out[i] = p;
    }
    out
}
