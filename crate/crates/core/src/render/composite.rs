use crate::image::{Frame, RgbImage};

use super::{RenderError, RenderedImage};

pub const WIREFRAME_COLOR: [u8; 3] = [255, 64, 0];

/// Relative depth slack for wireframe visibility.
const EDGE_DEPTH_BIAS: f64 = 1e-3;

/// Draws rendered pixels over the grayscale frame. With `wireframe`, the
/// rendered triangle edges that are not hidden behind other geometry are
/// drawn on top.
pub fn composite_overlay(frame: &Frame, render: &RenderedImage, wireframe: bool) -> Result<RgbImage, RenderError> {
    if (frame.width(), frame.height()) != (render.width, render.height) {
        return Err(RenderError::DimensionMismatch {
            frame: (frame.width(), frame.height()),
            render: (render.width, render.height),
        });
    }
    let mut out = frame.to_rgb();
    for (i, d) in render.depth.iter().enumerate() {
        if d.is_finite() {
            out.data[3 * i..3 * i + 3].copy_from_slice(&render.color[3 * i..3 * i + 3]);
        }
    }
    if wireframe {
        for e in &render.edges {
            draw_edge(&mut out, render, e.a, e.b);
        }
    }
    Ok(out)
}

/// DDA walk from `a` to `b`, interpolating depth through `1/z`.
fn draw_edge(out: &mut RgbImage, render: &RenderedImage, a: [f64; 3], b: [f64; 3]) {
    let (du, dv) = (b[0] - a[0], b[1] - a[1]);
    let steps = du.abs().max(dv.abs()).ceil().max(1.0);
    if !steps.is_finite() || steps > 1e6 {
        return;
    }
    let n = steps as usize;
    for i in 0..=n {
        let s = i as f64 / steps;
        let (u, v) = (a[0] + s * du, a[1] + s * dv);
        if !(u >= 0.0 && v >= 0.0 && u < render.width as f64 && v < render.height as f64) {
            continue;
        }
        let z = 1.0 / ((1.0 - s) / a[2] + s / b[2]);
        let (x, y) = (u as usize, v as usize);
        let depth = f64::from(render.depth[y * render.width + x]);
        if z <= depth * (1.0 + EDGE_DEPTH_BIAS) {
            out.put(x, y, WIREFRAME_COLOR);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ModelTransform;
    use crate::linalg::{Mat3, Vec3};
    use crate::mesh::unit_cube;
    use crate::render::rasterize;
    use crate::vision::{CameraIntrinsics, Pose};

    fn gray() -> Frame {
        Frame::from_fn(64, 48, |x, y| ((x * 3 + y * 5) % 256) as u8).unwrap()
    }

    #[test]
    fn empty_render_passes_frame_through() {
        let f = gray();
        let out = composite_overlay(&f, &RenderedImage::empty(64, 48).unwrap(), true).unwrap();
        assert_eq!(out, f.to_rgb());
    }

    #[test]
    fn full_coverage_shows_render() {
        let f = gray();
        let mut r = RenderedImage::empty(64, 48).unwrap();
        r.depth.fill(10.0);
        r.color.iter_mut().enumerate().for_each(|(i, c)| *c = (i % 251) as u8);
        let out = composite_overlay(&f, &r, false).unwrap();
        assert_eq!(out.data, r.color);
    }

    #[test]
    fn size_mismatch() {
        let r = RenderedImage::empty(10, 48).unwrap();
        assert_eq!(
            composite_overlay(&gray(), &r, false),
            Err(RenderError::DimensionMismatch { frame: (64, 48), render: (10, 48) })
        );
    }

    #[test]
    fn wireframe_draws_only_visible_edges() {
        let k = CameraIntrinsics::new(800.0, 800.0, 320.0, 240.0).unwrap();
        let pose = Pose::new(Mat3::identity(), Vec3::new(0.0, 0.0, 500.0));
        let model = ModelTransform { scale: 80.0, translation: Vec3::splat(-0.5), ..Default::default() };
        let r = rasterize(&unit_cube(), &model, &pose, &k, 640, 480).unwrap();
        let f = Frame::filled(640, 480, 0).unwrap();
        let plain = composite_overlay(&f, &r, false).unwrap();
        let wire = composite_overlay(&f, &r, true).unwrap();
        let changed: Vec<(usize, usize)> = (0..480)
            .flat_map(|y| (0..640).map(move |x| (x, y)))
            .filter(|&(x, y)| plain.get(x, y) != wire.get(x, y))
            .collect();
        assert!(!changed.is_empty());
        // the far face's outline sits inside the near face, hidden by it
        let far_half = 800.0 * 40.0 / 540.0;
        let hidden = |x: usize, y: usize| {
            let (dx, dy) = ((x as f64 + 0.5 - 320.0).abs(), (y as f64 + 0.5 - 240.0).abs());
            (dx - far_half).abs() < 0.5 && dy < far_half - 3.0
        };
        assert!(changed.iter().all(|&(x, y)| !hidden(x, y)));
    }
}
