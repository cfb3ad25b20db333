use crate::image::BinaryImage;
use crate::linalg::Point2;

/// Four image corners, counter-clockwise on screen, starting from the
/// topmost (then leftmost) corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCandidate {
    pub corners: [Point2<f64>; 4],
}

impl QuadCandidate {
    pub fn area(&self) -> f64 {
        polygon_area(&self.corners).abs()
    }
}

/// Shoelace sum in y-down image coordinates: positive for clockwise-on-screen.
fn polygon_area(p: &[Point2<f64>]) -> f64 {
    let n = p.len();
    (0..n).map(|i| p[i].x * p[(i + 1) % n].y - p[(i + 1) % n].x * p[i].y).sum::<f64>() / 2.0
}

struct Blob {
    start: (usize, usize),
    min: (usize, usize),
    max: (usize, usize),
}

/// 8-connected foreground components, each with its first pixel in raster order.
fn blobs(img: &BinaryImage) -> Vec<Blob> {
    let (w, h) = (img.width, img.height);
    let mut seen = vec![false; w * h];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !img.get(x, y) || seen[y * w + x] {
                continue;
            }
            let mut blob = Blob { start: (x, y), min: (x, y), max: (x, y) };
            seen[y * w + x] = true;
            stack.push((x, y));
            while let Some((px, py)) = stack.pop() {
                blob.min = (blob.min.0.min(px), blob.min.1.min(py));
                blob.max = (blob.max.0.max(px), blob.max.1.max(py));
                for ny in py.saturating_sub(1)..=(py + 1).min(h - 1) {
                    for nx in px.saturating_sub(1)..=(px + 1).min(w - 1) {
                        let i = ny * w + nx;
                        if img.data[i] && !seen[i] {
                            seen[i] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            out.push(blob);
        }
    }
    out
}

/// Traces the outer boundary of the component containing `start` along pixel
/// edges (lattice vertices at pixel corners), keeping the foreground on the
/// right. Left turns are tried first so diagonal neighbors stay connected.
/// The result runs clockwise on screen.
fn trace_outer(img: &BinaryImage, start: (usize, usize)) -> Vec<(i64, i64)> {
    let fg = |x: i64, y: i64| img.get_signed(x, y);
    // Pixel on the right / left of the unit edge leaving `v` along `d`,
    // found from doubled coordinates of the edge midpoint ± half the normal.
    let side = |v: (i64, i64), d: (i64, i64), right: bool| {
        let n = if right { (-d.1, d.0) } else { (d.1, -d.0) };
        ((2 * v.0 + d.0 + n.0).div_euclid(2), (2 * v.1 + d.1 + n.1).div_euclid(2))
    };
    let is_boundary = |v, d| {
        let r = side(v, d, true);
        let l = side(v, d, false);
        fg(r.0, r.1) && !fg(l.0, l.1)
    };

    let origin = (start.0 as i64, start.1 as i64);
    let first_dir = (1, 0);
    let mut v = origin;
    let mut d = first_dir;
    let mut contour = vec![v];
    let limit = 4 * (img.width + 1) * (img.height + 1);
    for _ in 0..limit {
        v = (v.0 + d.0, v.1 + d.1);
        let left = (d.1, -d.0);
        let right = (-d.1, d.0);
        let back = (-d.0, -d.1);
        let next = [left, d, right, back].into_iter().find(|&c| is_boundary(v, c)).unwrap_or(back);
        if v == origin && next == first_dir {
            break;
        }
        contour.push(v);
        d = next;
    }
    contour
}

fn point_line_distance(p: Point2<f64>, a: Point2<f64>, b: Point2<f64>) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len = dx.hypot(dy);
    if len == 0.0 {
        return p.distance(a);
    }
    ((p.x - a.x) * dy - (p.y - a.y) * dx).abs() / len
}

/// Split-based polygon approximation of the open chain `pts[lo..=hi]`
/// (indices wrap modulo `pts.len()`); pushes the kept interior indices.
fn split_chain(pts: &[Point2<f64>], lo: usize, hi: usize, tol: f64, out: &mut Vec<usize>) {
    let n = pts.len();
    let span = (hi + n - lo) % n;
    if span < 2 {
        return;
    }
    let (a, b) = (pts[lo], pts[hi % n]);
    let (mut best, mut best_d) = (lo, -1.0);
    for k in 1..span {
        let i = (lo + k) % n;
        let d = point_line_distance(pts[i], a, b);
        if d > best_d {
            best_d = d;
            best = i;
        }
    }
    if best_d > tol {
        split_chain(pts, lo, best, tol, out);
        out.push(best);
        split_chain(pts, best, hi, tol, out);
    }
}

/// Closed-contour approximation: split at the point farthest from the
/// centroid and the point farthest from that, then refine each half.
fn approximate_polygon(pts: &[Point2<f64>], tol: f64) -> Vec<usize> {
    let n = pts.len() as f64;
    let c = Point2::new(pts.iter().map(|p| p.x).sum::<f64>() / n, pts.iter().map(|p| p.y).sum::<f64>() / n);
    let far = |from: Point2<f64>| {
        (0..pts.len()).max_by(|&i, &j| pts[i].distance(from).total_cmp(&pts[j].distance(from))).unwrap_or(0)
    };
    let a = far(c);
    let b = far(pts[a]);
    let (a, b) = (a.min(b), a.max(b));
    if a == b {
        return vec![a];
    }
    let mut out = vec![a];
    split_chain(pts, a, b, tol, &mut out);
    out.push(b);
    split_chain(pts, b, a, tol, &mut out);
    out
}

/// Total-least-squares line through points: (centroid, unit direction).
fn fit_line(pts: impl Iterator<Item = Point2<f64>> + Clone) -> Option<(Point2<f64>, (f64, f64))> {
    let n = pts.clone().count() as f64;
    if n < 2.0 {
        return None;
    }
    let (sx, sy) = pts.clone().fold((0.0, 0.0), |a, p| (a.0 + p.x, a.1 + p.y));
    let c = Point2::new(sx / n, sy / n);
    let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
    for p in pts {
        let (dx, dy) = (p.x - c.x, p.y - c.y);
        xx += dx * dx;
        xy += dx * dy;
        yy += dy * dy;
    }
    let theta = 0.5 * (2.0 * xy).atan2(xx - yy);
    Some((c, (theta.cos(), theta.sin())))
}

fn intersect(l1: (Point2<f64>, (f64, f64)), l2: (Point2<f64>, (f64, f64))) -> Option<Point2<f64>> {
    let ((p, d), (q, e)) = (l1, l2);
    let den = d.0 * e.1 - d.1 * e.0;
    if den.abs() < 1e-6 {
        return None;
    }
    let t = ((q.x - p.x) * e.1 - (q.y - p.y) * e.0) / den;
    Some(Point2::new(p.x + t * d.0, p.y + t * d.1))
}

/// Replaces each polygon corner by the intersection of lines fitted to the
/// contour stretches on either side, trimming the ends of every stretch.
fn refine_corners(pts: &[Point2<f64>], idx: &[usize; 4]) -> Option<[Point2<f64>; 4]> {
    let n = pts.len();
    let mut lines = Vec::with_capacity(4);
    for k in 0..4 {
        let (lo, hi) = (idx[k], idx[(k + 1) % 4]);
        let span = (hi + n - lo) % n;
        let trim = (span / 8).max(1);
        if span < 2 * trim + 2 {
            return None;
        }
        let stretch = (trim..=span - trim).map(move |j| pts[(lo + j) % n]);
        lines.push(fit_line(stretch)?);
    }
    let mut out = [Point2::new(0.0, 0.0); 4];
    for k in 0..4 {
        let p = intersect(lines[(k + 3) % 4], lines[k])?;
        // a corner that wanders far from the polygon vertex means the side was not straight
        if p.distance(pts[idx[k]]) > 0.1 * pts[idx[k]].distance(pts[idx[(k + 1) % 4]]) + 2.0 {
            return None;
        }
        out[k] = p;
    }
    Some(out)
}

fn is_convex(c: &[Point2<f64>; 4]) -> bool {
    let signs: Vec<f64> = (0..4)
        .map(|i| {
            let (a, b, d) = (c[i], c[(i + 1) % 4], c[(i + 2) % 4]);
            (b.x - a.x) * (d.y - b.y) - (b.y - a.y) * (d.x - b.x)
        })
        .collect();
    signs.iter().all(|&s| s > 0.0) || signs.iter().all(|&s| s < 0.0)
}

/// Finds convex quadrilaterals among the outer contours of foreground regions.
///
/// Contours are simplified with tolerance 2% of their perimeter; those with
/// exactly four vertices have their corners sharpened by intersecting lines
/// fitted to the four sides, then are kept when convex with area at least
/// `min_area` px².
pub fn extract_quads(img: &BinaryImage, min_area: f64) -> Vec<QuadCandidate> {
    let mut quads = Vec::new();
    for blob in blobs(img) {
        let bbox_area = ((blob.max.0 - blob.min.0 + 1) * (blob.max.1 - blob.min.1 + 1)) as f64;
        if bbox_area < min_area || blob.max.0 == blob.min.0 || blob.max.1 == blob.min.1 {
            continue;
        }
        let contour: Vec<Point2<f64>> =
            trace_outer(img, blob.start).into_iter().map(|(x, y)| Point2::new(x as f64, y as f64)).collect();
        let tol = 0.02 * contour.len() as f64;
        let mut idx = approximate_polygon(&contour, tol);
        if idx.len() != 4 {
            continue;
        }
        idx.sort_unstable();
        let idx = [idx[0], idx[1], idx[2], idx[3]];
        let rough = idx.map(|i| contour[i]);
        let mut corners = refine_corners(&contour, &idx).unwrap_or(rough);
        if !is_convex(&corners) || polygon_area(&corners).abs() < min_area {
            continue;
        }
        if polygon_area(&corners) > 0.0 {
            corners.reverse();
        }
        let first = (0..4)
            .min_by(|&i, &j| corners[i].y.total_cmp(&corners[j].y).then(corners[i].x.total_cmp(&corners[j].x)))
            .unwrap_or(0);
        corners.rotate_left(first);
        quads.push(QuadCandidate { corners });
    }
    quads
}
