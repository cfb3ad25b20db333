use crate::image::{BinaryImage, Frame};

use super::VisionError;

/// Marks a pixel as foreground (dark) when it is more than `offset` below
/// the mean of the `window`×`window` neighborhood centered on it. Near the
/// image edges the window is clipped to the image and the mean taken over
/// the pixels that remain.
///
/// Comparisons are done in exact integer arithmetic, so scaling every pixel
/// and the offset by the same positive factor (and shifting pixels by a
/// constant) leaves the result unchanged.
pub fn adaptive_threshold(frame: &Frame, window: usize, offset: i32) -> Result<BinaryImage, VisionError> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(VisionError::InvalidWindow(window));
    }
    let (w, h) = (frame.width(), frame.height());
    let stride = w + 1;
    let mut integral = vec![0u64; stride * (h + 1)];
    for y in 0..h {
        let mut row = 0u64;
        for x in 0..w {
            row += u64::from(frame.get(x, y));
            integral[(y + 1) * stride + x + 1] = integral[y * stride + x + 1] + row;
        }
    }
    let r = window / 2;
    let mut data = vec![false; w * h];
    for y in 0..h {
        let (y0, y1) = (y.saturating_sub(r), (y + r + 1).min(h));
        for x in 0..w {
            let (x0, x1) = (x.saturating_sub(r), (x + r + 1).min(w));
            let sum = integral[y1 * stride + x1] + integral[y0 * stride + x0]
                - integral[y0 * stride + x1]
                - integral[y1 * stride + x0];
            let count = ((x1 - x0) * (y1 - y0)) as i64;
            let v = i64::from(frame.get(x, y));
            // v < sum/count - offset
            data[y * w + x] = (v + i64::from(offset)) * count < sum as i64;
        }
    }
    Ok(BinaryImage { width: w, height: h, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct per-pixel window mean, no integral image.
    fn oracle(frame: &Frame, window: usize, offset: i32) -> Vec<bool> {
        let r = (window / 2) as i64;
        let (w, h) = (frame.width() as i64, frame.height() as i64);
        let mut out = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let (mut sum, mut n) = (0.0, 0.0);
                for yy in (y - r).max(0)..=(y + r).min(h - 1) {
                    for xx in (x - r).max(0)..=(x + r).min(w - 1) {
                        sum += f64::from(frame.get(xx as usize, yy as usize));
                        n += 1.0;
                    }
                }
                out.push(f64::from(frame.get(x as usize, y as usize)) < sum / n - f64::from(offset));
            }
        }
        out
    }

    #[test]
    fn constant_frame_is_background() {
        let f = Frame::filled(40, 30, 128).unwrap();
        assert_eq!(adaptive_threshold(&f, 31, 10).unwrap().count(), 0);
    }

    #[test]
    fn square_under_brightness_ramp() {
        let (w, h) = (120, 80);
        let f = Frame::from_fn(w, h, |x, y| {
            let ramp = 60.0 + 140.0 * x as f64 / (w - 1) as f64;
            if (40..70).contains(&x) && (25..55).contains(&y) {
                (0.1 * ramp) as u8
            } else {
                ramp as u8
            }
        })
        .unwrap();
        let b = adaptive_threshold(&f, 31, 7).unwrap();
        assert_eq!(b.data, oracle(&f, 31, 7));
        // the square's rim is dark against its surroundings
        for x in 40..70 {
            assert!(b.get(x, 25) && b.get(x, 54));
        }
        assert!(!b.get(5, 5) && !b.get(110, 70));
    }

    #[test]
    fn checkerboard_alternates() {
        let cell = 4;
        let f = Frame::from_fn(64, 64, |x, y| if (x / cell + y / cell) % 2 == 0 { 40 } else { 210 }).unwrap();
        let b = adaptive_threshold(&f, 31, 7).unwrap();
        assert_eq!(b.data, oracle(&f, 31, 7));
        for y in 0..64 {
            for x in 0..64 {
                assert_eq!(b.get(x, y), (x / cell + y / cell) % 2 == 0, "({x},{y})");
            }
        }
    }

    #[test]
    fn invariant_under_affine_luminance() {
        let f = Frame::from_fn(50, 40, |x, y| ((x * 37 + y * 11) % 97 + 10) as u8).unwrap();
        let g = Frame::from_fn(50, 40, |x, y| 2 * f.get(x, y) + 13).unwrap();
        assert_eq!(adaptive_threshold(&f, 15, 5).unwrap(), adaptive_threshold(&g, 15, 10).unwrap());
    }

    #[test]
    fn window_must_be_odd() {
        let f = Frame::filled(16, 16, 0).unwrap();
        assert_eq!(adaptive_threshold(&f, 4, 7), Err(VisionError::InvalidWindow(4)));
        assert_eq!(adaptive_threshold(&f, 1, 7), Err(VisionError::InvalidWindow(1)));
    }
}
