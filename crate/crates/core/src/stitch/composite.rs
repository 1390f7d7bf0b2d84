use crate::homography::Homography;
use crate::imaging::{FrameSpec, GrayImage};

/// Canvas sides are capped at this multiple of the input sides, which only
/// matters for near-degenerate transforms.
const MAX_CANVAS_FACTOR: f64 = 8.0;

/// Placement of a panorama relative to the left image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canvas {
    /// Left-image coordinates of canvas pixel (0, 0).
    pub origin: (i64, i64),
    pub width: usize,
    pub height: usize,
}

fn warped_bounds(right: &GrayImage, to_left: &Homography) -> Option<(f64, f64, f64, f64)> {
    let (w, h) = ((right.width() - 1) as f64, (right.height() - 1) as f64);
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (x, y) in [(0.0, 0.0), (w, 0.0), (0.0, h), (w, h)] {
        let (u, v) = to_left.apply(x, y)?;
        b = (b.0.min(u), b.1.min(v), b.2.max(u), b.3.max(v));
    }
    Some(b)
}

/// Bounding box of the left frame and the warped right frame.
pub fn canvas_for(left: &GrayImage, right: &GrayImage, right_to_left: &Homography) -> Canvas {
    let (lw, lh) = ((left.width() - 1) as f64, (left.height() - 1) as f64);
    let (mut x0, mut y0, mut x1, mut y1) = (0.0, 0.0, lw, lh);
    if let Some(b) = warped_bounds(right, right_to_left) {
        let mx = MAX_CANVAS_FACTOR * left.width() as f64;
        let my = MAX_CANVAS_FACTOR * left.height() as f64;
        x0 = b.0.max(-mx).min(x0);
        y0 = b.1.max(-my).min(y0);
        x1 = b.2.min(lw + mx).max(x1);
        y1 = b.3.min(lh + my).max(y1);
    }
    const EPS: f64 = 1e-6;
    let ox = (x0 + EPS).floor() as i64;
    let oy = (y0 + EPS).floor() as i64;
    let ex = (x1 - EPS).ceil() as i64;
    let ey = (y1 - EPS).ceil() as i64;
    Canvas { origin: (ox, oy), width: (ex - ox + 1) as usize, height: (ey - oy + 1) as usize }
}

/// Value of `right` seen at left-frame position `(x, y)`, if covered. Uses
/// nearest-neighbour lookup, like the renderer.
pub(super) fn sample_right(right: &GrayImage, left_to_right: &Homography, x: f64, y: f64) -> Option<u8> {
    let (u, v) = left_to_right.apply(x, y)?;
    let (u, v) = (u.round(), v.round());
    let inside = u >= 0.0 && v >= 0.0 && u < right.width() as f64 && v < right.height() as f64;
    inside.then(|| right.get(u as usize, v as usize))
}

/// Both frames drawn on one canvas in left-frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Panorama {
    pub image: GrayImage,
    pub canvas: Canvas,
    /// Canvas pixels covered by at least one frame.
    pub covered: usize,
}

/// Draws both frames on one canvas in the left frame's coordinates without
/// trimming. Where both cover a pixel the rounded mean is kept; pixels
/// neither frame covers are 0. Returns `None` if the transform is singular.
pub fn composite(left: &GrayImage, right: &GrayImage, right_to_left: &Homography) -> Option<Panorama> {
    let left_to_right = right_to_left.inverse()?;
    let canvas = canvas_for(left, right, right_to_left);
    let spec = FrameSpec { width: canvas.width, height: canvas.height };
    let (ox, oy) = canvas.origin;
    let mut covered = 0;
    let image = GrayImage::from_fn(spec, |cx, cy| {
        let x = cx as i64 + ox;
        let y = cy as i64 + oy;
        let l = (x >= 0 && y >= 0 && (x as usize) < left.width() && (y as usize) < left.height())
            .then(|| left.get(x as usize, y as usize) as u16);
        let r = sample_right(right, &left_to_right, x as f64, y as f64).map(u16::from);
        let v = match (l, r) {
            (Some(a), Some(b)) => (a + b).div_ceil(2),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => return 0,
        };
        covered += 1;
        v as u8
    });
    Some(Panorama { image, canvas, covered })
}
