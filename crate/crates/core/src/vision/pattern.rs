use crate::image::Frame;
use crate::linalg::Point2;
use crate::scalar::Real;

use super::{Homography, VisionError};

pub const DEFAULT_GRID: usize = 16;
pub const DEFAULT_BORDER_FRACTION: f64 = 0.25;

/// Trained appearance of the marker interior: an `n`×`n` luminance grid,
/// row-major with row 0 at the top of the upright marker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkerPattern {
    n: usize,
    /// Stored as parts-per-million so the type stays `Eq`; see [`Self::border_fraction`].
    border_ppm: u32,
    grid: Vec<u8>,
}

impl MarkerPattern {
    pub fn new(n: usize, border_fraction: f64, grid: Vec<u8>) -> Result<Self, VisionError> {
        if n < 4 {
            return Err(VisionError::InvalidPattern(format!("grid size {n} is below 4")));
        }
        if !(border_fraction > 0.0 && border_fraction < 0.5) {
            return Err(VisionError::InvalidPattern(format!("border fraction {border_fraction} not in (0, 0.5)")));
        }
        if grid.len() != n * n {
            return Err(VisionError::InvalidPattern(format!("{} samples for a {n}x{n} grid", grid.len())));
        }
        Ok(Self { n, border_ppm: (border_fraction * 1e6).round() as u32, grid })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn border_fraction(&self) -> f64 {
        f64::from(self.border_ppm) / 1e6
    }

    #[inline]
    pub fn grid(&self) -> &[u8] {
        &self.grid
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.grid[row * self.n + col]
    }

    /// Value of the cell containing continuous grid coordinates `(gx, gy)`,
    /// clamped to the grid.
    pub fn cell_at(&self, gx: f64, gy: f64) -> u8 {
        let max = (self.n - 1) as f64;
        let col = gx.floor().clamp(0.0, max) as usize;
        let row = gy.floor().clamp(0.0, max) as usize;
        self.get(row, col)
    }

    /// Text form: `ARPAT 1`, then `n border_fraction`, then `n` rows of `n`
    /// integers in 0..=255.
    pub fn to_arpat(&self) -> String {
        let mut s = format!("ARPAT 1\n{} {}\n", self.n, self.border_fraction());
        for row in self.grid.chunks(self.n) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_arpat(text: &str) -> Result<Self, VisionError> {
        let bad = |m: String| VisionError::InvalidPattern(m);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        match lines.next() {
            Some(l) if l.split_whitespace().collect::<Vec<_>>() == ["ARPAT", "1"] => {}
            other => return Err(bad(format!("expected `ARPAT 1` header, found {other:?}"))),
        }
        let dims: Vec<&str> = lines.next().ok_or_else(|| bad("missing size line".into()))?.split_whitespace().collect();
        let [n, border] = dims[..] else {
            return Err(bad("size line must be `n border_fraction`".into()));
        };
        let n: usize = n.parse().map_err(|_| bad(format!("bad grid size `{n}`")))?;
        let border: f64 = border.parse().map_err(|_| bad(format!("bad border fraction `{border}`")))?;
        let mut grid = Vec::with_capacity(n * n);
        for r in 0..n {
            let line = lines.next().ok_or_else(|| bad(format!("missing row {r}")))?;
            let row: Vec<u8> = line
                .split_whitespace()
                .map(|t| t.parse::<u8>().map_err(|_| bad(format!("bad sample `{t}` in row {r}"))))
                .collect::<Result<_, _>>()?;
            if row.len() != n {
                return Err(bad(format!("row {r} has {} samples, expected {n}", row.len())));
            }
            grid.extend(row);
        }
        if lines.next().is_some() {
            return Err(bad("trailing data after the last row".into()));
        }
        Self::new(n, border, grid)
    }
}

/// Rotates a row-major `n`×`n` grid by a quarter turn counter-clockwise as
/// seen on screen (the top-right cell becomes the top-left).
pub fn rotate_grid_ccw<V: Copy>(grid: &[V], n: usize) -> Vec<V> {
    (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| grid[c * n + (n - 1 - r)]).collect()
}

/// Samples the `n`×`n` cell centers of the unit square `[0,1]²` mapped into
/// the frame by `interior` (bilinear interpolation).
pub fn sample_grid<T: Real>(frame: &Frame, interior: &Homography<T>, n: usize) -> Result<Vec<f64>, VisionError> {
    let nf = T::lit(n as f64);
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            let u = (T::lit(c as f64) + half) / nf;
            let v = (T::lit(r as f64) + half) / nf;
            let p = interior.apply(Point2::new(u, v)).ok_or(VisionError::OutOfFrame)?;
            let s =
                frame.sample_bilinear(p.x.to_f64_lossless(), p.y.to_f64_lossless()).ok_or(VisionError::OutOfFrame)?;
            out.push(s);
        }
    }
    Ok(out)
}

/// Learns a pattern from a straight-on image of the whole marker, border
/// included: the interior left after removing `border_fraction` of the side
/// on every edge is box-filtered down to `n`×`n` (area weighted, rounded).
pub fn train_pattern(image: &Frame, n: usize, border_fraction: f64) -> Result<MarkerPattern, VisionError> {
    if image.width() < 2 * n || image.height() < 2 * n {
        return Err(VisionError::TooSmall { width: image.width(), height: image.height(), n });
    }
    // validates n and border before touching pixels
    MarkerPattern::new(n, border_fraction, vec![0; n * n])?;
    let span = |len: usize| {
        let len = len as f64;
        (border_fraction * len, (1.0 - 2.0 * border_fraction) * len / n as f64)
    };
    let (x_start, cell_w) = span(image.width());
    let (y_start, cell_h) = span(image.height());
    let overlap = |lo: f64, hi: f64, k: usize| (hi.min(k as f64 + 1.0) - lo.max(k as f64)).max(0.0);

    let mut grid = Vec::with_capacity(n * n);
    for r in 0..n {
        let (y0, y1) = (y_start + r as f64 * cell_h, y_start + (r + 1) as f64 * cell_h);
        for c in 0..n {
            let (x0, x1) = (x_start + c as f64 * cell_w, x_start + (c + 1) as f64 * cell_w);
            let (mut acc, mut weight) = (0.0, 0.0);
            for py in y0.floor() as usize..(y1.ceil() as usize).min(image.height()) {
                let wy = overlap(y0, y1, py);
                for px in x0.floor() as usize..(x1.ceil() as usize).min(image.width()) {
                    let wgt = wy * overlap(x0, x1, px);
                    acc += wgt * f64::from(image.get(px, py));
                    weight += wgt;
                }
            }
            grid.push((acc / weight).round().clamp(0.0, 255.0) as u8);
        }
    }
    MarkerPattern::new(n, border_fraction, grid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternMatch {
    /// `(1 + ncc) / 2` for the best rotation, in `[0, 1]`.
    pub confidence: f64,
    /// Quarter turns (counter-clockwise on screen) by which the samples are
    /// rotated relative to the pattern.
    pub rotation_index: u8,
}

fn zero_mean(v: impl Iterator<Item = f64> + Clone) -> (Vec<f64>, f64) {
    let n = v.clone().count() as f64;
    let mean = v.clone().sum::<f64>() / n;
    let z: Vec<f64> = v.map(|x| x - mean).collect();
    let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    (z, norm)
}

/// Scores the samples against all four quarter-turn rotations of the pattern.
///
/// Returns the best rotation (lowest index on ties) or `None` when its
/// confidence is below `threshold`. A flat grid on either side has no
/// correlation and scores 0.5.
pub fn match_pattern(
    samples: &[f64],
    pattern: &MarkerPattern,
    threshold: f64,
) -> Result<Option<PatternMatch>, VisionError> {
    let n = pattern.n();
    if samples.len() != n * n {
        return Err(VisionError::GridMismatch { samples: samples.len(), expected: n * n });
    }
    let (s, s_norm) = zero_mean(samples.iter().copied());
    let mut rotated = pattern.grid().to_vec();
    let mut best = PatternMatch { confidence: -1.0, rotation_index: 0 };
    for k in 0..4u8 {
        let (p, p_norm) = zero_mean(rotated.iter().map(|&v| f64::from(v)));
        let ncc = if s_norm > 0.0 && p_norm > 0.0 {
            (s.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>() / (s_norm * p_norm)).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        let confidence = (1.0 + ncc) / 2.0;
        if confidence > best.confidence {
            best = PatternMatch { confidence, rotation_index: k };
        }
        rotated = rotate_grid_ccw(&rotated, n);
    }
    Ok((best.confidence >= threshold).then_some(best))
}

/// 4×4 block layout of the bundled reference marker (1 = white). Its
/// quarter-turn rotations are uncorrelated with it (zero-mean NCC of 0).
const REFERENCE_BLOCKS: [[u8; 4]; 4] = [[1, 1, 0, 1], [1, 1, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]];

/// The bundled 16×16 reference pattern, border fraction 0.25.
pub fn reference_pattern() -> MarkerPattern {
    let n = DEFAULT_GRID;
    let grid = (0..n * n).map(|i| if REFERENCE_BLOCKS[(i / n) / 4][(i % n) / 4] == 1 { 255 } else { 0 }).collect();
    MarkerPattern::new(n, DEFAULT_BORDER_FRACTION, grid).expect("reference pattern is valid")
}

/// Printable bitmap of a marker: black border, pattern interior, `side` px square.
pub fn reference_marker_image(pattern: &MarkerPattern, side: usize) -> Result<Frame, crate::image::ImageError> {
    let bf = pattern.border_fraction();
    Frame::from_fn(side, side, |x, y| {
        let u = (x as f64 + 0.5) / side as f64;
        let v = (y as f64 + 0.5) / side as f64;
        if u < bf || u > 1.0 - bf || v < bf || v > 1.0 - bf {
            return 0;
        }
        let n = pattern.n() as f64;
        pattern.cell_at((u - bf) / (1.0 - 2.0 * bf) * n, (v - bf) / (1.0 - 2.0 * bf) * n)
    })
}
