//! 8-bit raster images and the netpbm formats used for frames (PGM P5) and
//! overlay output (PPM P6).

use thiserror::Error;

pub const MIN_FRAME_SIDE: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImageError {
    #[error("frame must be at least {MIN_FRAME_SIDE}x{MIN_FRAME_SIDE}, got {width}x{height}")]
    TooSmall { width: usize, height: usize },
    #[error("pixel buffer holds {actual} values, expected {expected}")]
    BadLength { expected: usize, actual: usize },
    #[error("malformed netpbm data: {0}")]
    Malformed(String),
    #[error("unsupported netpbm variant: {0}")]
    Unsupported(String),
}

/// Grayscale camera frame, row-major 8-bit luminance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width < MIN_FRAME_SIDE || height < MIN_FRAME_SIDE {
            return Err(ImageError::TooSmall { width, height });
        }
        if data.len() != width * height {
            return Err(ImageError::BadLength { expected: width * height, actual: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> u8) -> Result<Self, ImageError> {
        let data = (0..height).flat_map(|y| (0..width).map(move |x| (x, y))).map(|(x, y)| f(x, y)).collect();
        Self::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// Bilinear sample at continuous image coordinates, where pixel `(i, j)`
    /// covers `[i, i+1) × [j, j+1)` and its value sits at the center.
    /// Returns `None` outside `[0, width] × [0, height]`.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Option<f64> {
        if !(x >= 0.0 && y >= 0.0 && x <= self.width as f64 && y <= self.height as f64) {
            return None;
        }
        let fx = (x - 0.5).clamp(0.0, (self.width - 1) as f64);
        let fy = (y - 0.5).clamp(0.0, (self.height - 1) as f64);
        let (x0, y0) = (fx.floor() as usize, fy.floor() as usize);
        let (x1, y1) = ((x0 + 1).min(self.width - 1), (y0 + 1).min(self.height - 1));
        let (ax, ay) = (fx - x0 as f64, fy - y0 as f64);
        let p = |x: usize, y: usize| f64::from(self.get(x, y));
        let top = p(x0, y0) * (1.0 - ax) + p(x1, y0) * ax;
        let bottom = p(x0, y1) * (1.0 - ax) + p(x1, y1) * ax;
        Some(top * (1.0 - ay) + bottom * ay)
    }

    pub fn to_rgb(&self) -> RgbImage {
        RgbImage { width: self.width, height: self.height, data: self.data.iter().flat_map(|&v| [v, v, v]).collect() }
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_pgm(bytes: &[u8]) -> Result<Self, ImageError> {
        let (magic, width, height, body) = parse_header(bytes)?;
        if magic != "P5" {
            return Err(ImageError::Unsupported(format!("expected P5 grayscale, found {magic}")));
        }
        let need = width * height;
        if body.len() < need {
            return Err(ImageError::Malformed(format!("pixel data truncated: {} of {need} bytes", body.len())));
        }
        Self::new(width, height, body[..need].to_vec())
    }

    /// Converts an RGB image with luma weights (0.299, 0.587, 0.114).
    pub fn from_rgb_luma(img: &RgbImage) -> Result<Self, ImageError> {
        let data = img
            .data
            .chunks_exact(3)
            .map(|p| (0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2])).round() as u8)
            .collect();
        Self::new(img.width, img.height, data)
    }
}

/// Foreground mask produced by thresholding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
}

impl BinaryImage {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Foreground test that treats everything outside the image as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height && self.get(x as usize, y as usize)
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB triples.
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![0; width * height * 3] }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn put(&mut self, x: usize, y: usize, c: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.data[i..i + 3].copy_from_slice(&c);
    }

    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn from_ppm(bytes: &[u8]) -> Result<Self, ImageError> {
        let (magic, width, height, body) = parse_header(bytes)?;
        if magic != "P6" {
            return Err(ImageError::Unsupported(format!("expected P6 color, found {magic}")));
        }
        let need = width * height * 3;
        if body.len() < need {
            return Err(ImageError::Malformed(format!("pixel data truncated: {} of {need} bytes", body.len())));
        }
        Ok(Self { width, height, data: body[..need].to_vec() })
    }
}

/// Parses `magic width height maxval` plus the single whitespace byte that
/// precedes binary pixel data. `#` comments are allowed between fields.
fn parse_header(bytes: &[u8]) -> Result<(String, usize, usize, &[u8]), ImageError> {
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        if start == pos {
            return Err(ImageError::Malformed("header ended early".into()));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(ImageError::Malformed("missing separator before pixel data".into()));
    }
    let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| ImageError::Malformed(format!("bad {what} `{s}`")));
    let width = num(&fields[1], "width")?;
    let height = num(&fields[2], "height")?;
    let maxval = num(&fields[3], "maxval")?;
    if maxval != 255 {
        return Err(ImageError::Unsupported(format!("maxval {maxval}; only 8-bit (255) images are supported")));
    }
    Ok((fields.swap_remove(0), width, height, &bytes[pos + 1..]))
}
