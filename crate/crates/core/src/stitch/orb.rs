//! Oriented FAST keypoints with rotated binary descriptors.

use serde::{Deserialize, Serialize};

use super::pattern::BRIEF_PAIRS;
use super::{StitchError, StitchParams};
use crate::imaging::GrayImage;

/// Smallest accepted input side.
pub const MIN_IMAGE_SIDE: usize = 32;

/// Radius of the patch used for orientation and description.
const PATCH_RADIUS: i32 = 15;
/// Keypoints closer than this to a level border are dropped.
const EDGE: usize = PATCH_RADIUS as usize + 1;
const HARRIS_K: f32 = 0.04;
const HARRIS_BLOCK: i32 = 3;

/// Bresenham circle of radius 3, clockwise from 12 o'clock.
const CIRCLE: [(i32, i32); 16] = [
    (0, -3), (1, -3), (2, -2), (3, -1), (3, 0), (3, 1), (2, 2), (1, 3),
    (0, 3), (-1, 3), (-2, 2), (-3, 1), (-3, 0), (-3, -1), (-2, -2), (-1, -3),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keypoint {
    /// Position in full-resolution pixel coordinates.
    pub x: f64,
    pub y: f64,
    /// Harris corner response at the detection level.
    pub response: f64,
    /// Intensity-centroid angle in radians.
    pub orientation: f64,
    /// Pyramid level the keypoint was detected on.
    pub octave: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Descriptor256(pub [u64; 4]);

impl Descriptor256 {
    pub fn hamming(&self, other: &Descriptor256) -> u32 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a ^ b).count_ones()).sum()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
}

/// Float image used for the pyramid levels.
#[derive(Debug, Clone)]
struct Plane {
    w: usize,
    h: usize,
    data: Vec<f32>,
}

impl Plane {
    fn from_gray(img: &GrayImage) -> Self {
        Plane { w: img.width(), h: img.height(), data: img.pixels().iter().map(|&p| p as f32).collect() }
    }

    #[inline]
    fn at(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.w + x]
    }

    #[inline]
    fn at_i(&self, x: i32, y: i32) -> f32 {
        self.data[y as usize * self.w + x as usize]
    }

    fn clamped(&self, x: i64, y: i64) -> f32 {
        let x = x.clamp(0, self.w as i64 - 1) as usize;
        let y = y.clamp(0, self.h as i64 - 1) as usize;
        self.at(x, y)
    }

    fn bilinear(&self, x: f64, y: f64) -> f32 {
        let x = x.clamp(0.0, (self.w - 1) as f64);
        let y = y.clamp(0.0, (self.h - 1) as f64);
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.w - 1);
        let y1 = (y0 + 1).min(self.h - 1);
        let fx = (x - x0 as f64) as f32;
        let fy = (y - y0 as f64) as f32;
        let top = self.at(x0, y0) * (1.0 - fx) + self.at(x1, y0) * fx;
        let bottom = self.at(x0, y1) * (1.0 - fx) + self.at(x1, y1) * fx;
        top * (1.0 - fy) + bottom * fy
    }

    /// Resamples to `w`×`h` with pixel centers aligned.
    fn resized(&self, w: usize, h: usize) -> Plane {
        let sx = self.w as f64 / w as f64;
        let sy = self.h as f64 / h as f64;
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            let v = (y as f64 + 0.5) * sy - 0.5;
            for x in 0..w {
                let u = (x as f64 + 0.5) * sx - 0.5;
                data.push(self.bilinear(u, v));
            }
        }
        Plane { w, h, data }
    }

    /// Separable Gaussian blur with edge clamping.
    fn blurred(&self, sigma: f64) -> Plane {
        let r = (3.0 * sigma).ceil() as i64;
        let mut k: Vec<f32> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp() as f32).collect();
        let sum: f32 = k.iter().sum();
        k.iter_mut().for_each(|v| *v /= sum);
        let mut tmp = vec![0f32; self.w * self.h];
        for y in 0..self.h {
            for x in 0..self.w {
                tmp[y * self.w + x] =
                    (-r..=r).zip(&k).map(|(i, kv)| kv * self.clamped(x as i64 + i, y as i64)).sum();
            }
        }
        let tmp = Plane { w: self.w, h: self.h, data: tmp };
        let mut out = vec![0f32; self.w * self.h];
        for y in 0..self.h {
            for x in 0..self.w {
                out[y * self.w + x] =
                    (-r..=r).zip(&k).map(|(i, kv)| kv * tmp.clamped(x as i64, y as i64 + i)).sum();
            }
        }
        Plane { w: self.w, h: self.h, data: out }
    }
}

/// FAST-9 segment test. Returns the corner score (sum of absolute
/// differences beyond the threshold over the circle) when `(x, y)` passes.
fn fast9(p: &Plane, x: i32, y: i32, threshold: f32) -> Option<f32> {
    let c = p.at_i(x, y);
    let ring: [f32; 16] = std::array::from_fn(|i| p.at_i(x + CIRCLE[i].0, y + CIRCLE[i].1));
    let state = |v: f32| -> i8 {
        if v > c + threshold {
            1
        } else if v < c - threshold {
            -1
        } else {
            0
        }
    };
    // quick rejection on the four compass points
    let compass = [0, 4, 8, 12].map(|i| state(ring[i]));
    let brighter = compass.iter().filter(|&&s| s == 1).count();
    let darker = compass.iter().filter(|&&s| s == -1).count();
    if brighter < 2 && darker < 2 {
        return None;
    }
    let states: [i8; 16] = std::array::from_fn(|i| state(ring[i]));
    let mut found = false;
    for target in [1i8, -1] {
        let mut run = 0;
        for i in 0..32 {
            if states[i % 16] == target {
                run += 1;
                if run >= 9 {
                    found = true;
                    break;
                }
            } else {
                run = 0;
            }
        }
        if found {
            break;
        }
    }
    if !found {
        return None;
    }
    Some(ring.iter().map(|&v| ((v - c).abs() - threshold).max(0.0)).sum())
}

fn harris(p: &Plane, x: i32, y: i32) -> f32 {
    let (mut sxx, mut syy, mut sxy) = (0f32, 0f32, 0f32);
    for dy in -HARRIS_BLOCK..=HARRIS_BLOCK {
        for dx in -HARRIS_BLOCK..=HARRIS_BLOCK {
            let (u, v) = (x + dx, y + dy);
            let gx = (p.at_i(u + 1, v - 1) + 2.0 * p.at_i(u + 1, v) + p.at_i(u + 1, v + 1))
                - (p.at_i(u - 1, v - 1) + 2.0 * p.at_i(u - 1, v) + p.at_i(u - 1, v + 1));
            let gy = (p.at_i(u - 1, v + 1) + 2.0 * p.at_i(u, v + 1) + p.at_i(u + 1, v + 1))
                - (p.at_i(u - 1, v - 1) + 2.0 * p.at_i(u, v - 1) + p.at_i(u + 1, v - 1));
            sxx += gx * gx;
            syy += gy * gy;
            sxy += gx * gy;
        }
    }
    // scale keeps responses in a readable range for 8-bit input
    let s = 1.0 / (4.0 * 255.0 * (2 * HARRIS_BLOCK + 1) as f32).powi(2);
    let (sxx, syy, sxy) = (sxx * s, syy * s, sxy * s);
    sxx * syy - sxy * sxy - HARRIS_K * (sxx + syy) * (sxx + syy)
}

/// Sub-pixel corner position from the gradient-orthogonality condition:
/// every gradient in the window is orthogonal to the vector from the corner
/// to its pixel. Falls back to the integer position when the window is
/// edge-like or the estimate wanders off.
fn refine_corner(p: &Plane, x: i32, y: i32) -> (f64, f64) {
    const R: i32 = 4;
    const LEASH: i32 = 3;
    const SIGMA2: f64 = 2.5 * 2.5;
    let (mut cx, mut cy) = (x, y);
    let mut q = (x as f64, y as f64);
    for _ in 0..5 {
        let (mut a, mut b, mut c, mut bx, mut by) = (0f64, 0f64, 0f64, 0f64, 0f64);
        for dy in -R..=R {
            for dx in -R..=R {
                let (u, v) = (cx + dx, cy + dy);
                let gx = (p.at_i(u + 1, v) - p.at_i(u - 1, v)) as f64 / 2.0;
                let gy = (p.at_i(u, v + 1) - p.at_i(u, v - 1)) as f64 / 2.0;
                let w = (-((dx * dx + dy * dy) as f64) / (2.0 * SIGMA2)).exp();
                let (gxx, gxy, gyy) = (w * gx * gx, w * gx * gy, w * gy * gy);
                a += gxx;
                b += gxy;
                c += gyy;
                bx += gxx * u as f64 + gxy * v as f64;
                by += gxy * u as f64 + gyy * v as f64;
            }
        }
        let det = a * c - b * b;
        let trace = a + c;
        // reject windows whose structure tensor is close to rank one
        if !(det > 0.05 * trace * trace) {
            return (x as f64, y as f64);
        }
        q = ((c * bx - b * by) / det, (a * by - b * bx) / det);
        let (nx, ny) = (q.0.round() as i32, q.1.round() as i32);
        if (nx, ny) == (cx, cy) {
            break;
        }
        if (nx - x).abs() > LEASH || (ny - y).abs() > LEASH {
            return (x as f64, y as f64);
        }
        (cx, cy) = (nx, ny);
    }
    if (q.0 - x as f64).hypot(q.1 - y as f64) > LEASH as f64 {
        return (x as f64, y as f64);
    }
    q
}

fn orientation(p: &Plane, x: i32, y: i32) -> f64 {
    let (mut m10, mut m01) = (0f64, 0f64);
    for dy in -PATCH_RADIUS..=PATCH_RADIUS {
        let span = ((PATCH_RADIUS * PATCH_RADIUS - dy * dy) as f64).sqrt() as i32;
        for dx in -span..=span {
            let v = p.at_i(x + dx, y + dy) as f64;
            m10 += dx as f64 * v;
            m01 += dy as f64 * v;
        }
    }
    m01.atan2(m10)
}

fn describe(smooth: &Plane, x: i32, y: i32, angle: f64) -> Descriptor256 {
    let (s, c) = angle.sin_cos();
    let rot = |px: i8, py: i8| -> (i32, i32) {
        let (px, py) = (px as f64, py as f64);
        ((c * px - s * py).round() as i32, (s * px + c * py).round() as i32)
    };
    let mut bits = [0u64; 4];
    for (i, pair) in BRIEF_PAIRS.iter().enumerate() {
        let (ax, ay) = rot(pair[0], pair[1]);
        let (bx, by) = rot(pair[2], pair[3]);
        if smooth.at_i(x + ax, y + ay) < smooth.at_i(x + bx, y + by) {
            bits[i / 64] |= 1 << (i % 64);
        }
    }
    Descriptor256(bits)
}

struct Candidate {
    x: i32,
    y: i32,
    score: f32,
}

/// Detects up to `params.max_keypoints` oriented keypoints, strongest Harris
/// response first (ties broken by y, then x), each with its descriptor.
pub fn detect_orb(img: &GrayImage, params: &StitchParams) -> Result<Vec<(Keypoint, Descriptor256)>, StitchError> {
    if img.width() < MIN_IMAGE_SIDE || img.height() < MIN_IMAGE_SIDE {
        return Err(StitchError::ImageTooSmall { width: img.width(), height: img.height() });
    }
    let threshold = params.fast_threshold as f32;
    let base = Plane::from_gray(img);
    let mut level = base.clone();
    let mut found = Vec::new();
    for octave in 0..params.pyramid_levels {
        let scale = params.pyramid_scale.powi(octave as i32);
        if octave > 0 {
            let w = (base.w as f64 / scale).round() as usize;
            let h = (base.h as f64 / scale).round() as usize;
            if w < 2 * EDGE + 1 || h < 2 * EDGE + 1 {
                break;
            }
            level = level.resized(w, h);
        }
        let (w, h) = (level.w as i32, level.h as i32);
        let e = EDGE as i32;
        let mut scores = vec![0f32; level.w * level.h];
        let mut candidates = Vec::new();
        for y in e..h - e {
            for x in e..w - e {
                if let Some(s) = fast9(&level, x, y, threshold) {
                    scores[(y * w + x) as usize] = s;
                    candidates.push(Candidate { x, y, score: s });
                }
            }
        }
        let smooth = level.blurred(2.0);
        for c in candidates {
            let idx = |dx: i32, dy: i32| ((c.y + dy) * w + c.x + dx) as usize;
            // strict on earlier neighbors, weak on later ones, so plateaus keep one point
            let suppressed = (-1..=1).flat_map(|dy| (-1..=1).map(move |dx| (dx, dy))).any(|(dx, dy)| {
                if dx == 0 && dy == 0 {
                    return false;
                }
                let n = scores[idx(dx, dy)];
                if (dy, dx) < (0, 0) {
                    n >= c.score
                } else {
                    n > c.score
                }
            });
            if suppressed {
                continue;
            }
            let response = harris(&level, c.x, c.y) as f64;
            let angle = orientation(&level, c.x, c.y);
            let (rx, ry) = refine_corner(&level, c.x, c.y);
            let kp = Keypoint {
                x: (rx + 0.5) * scale - 0.5,
                y: (ry + 0.5) * scale - 0.5,
                response,
                orientation: angle,
                octave: octave as u8,
            };
            found.push((kp, describe(&smooth, c.x, c.y, angle)));
        }
    }
    found.sort_by(|(a, _), (b, _)| {
        b.response
            .total_cmp(&a.response)
            .then(a.y.total_cmp(&b.y))
            .then(a.x.total_cmp(&b.x))
            .then(a.octave.cmp(&b.octave))
    });
    found.truncate(params.max_keypoints);
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HeadCameraRig;
    use crate::imaging::{render_view, FrameSpec, Pattern, PinholeCamera, PlanarScene, Side};

    fn text_view() -> GrayImage {
        let scene = PlanarScene::new(Pattern::Text { seed: 7 }, 36.8, [200.0, 200.0]).unwrap();
        render_view(&HeadCameraRig::default().with_yaw(5.0), Side::Left, &scene, FrameSpec::QVGA).unwrap()
    }

    #[test]
    fn flat_image_has_no_keypoints() {
        let img = GrayImage::filled(FrameSpec::QVGA, 128);
        assert!(detect_orb(&img, &StitchParams::default()).unwrap().is_empty());
    }

    #[test]
    fn tiny_image_is_rejected() {
        let img = GrayImage::filled(FrameSpec::new(31, 40).unwrap(), 0);
        assert!(matches!(detect_orb(&img, &StitchParams::default()), Err(StitchError::ImageTooSmall { .. })));
    }

    #[test]
    fn single_square_gives_four_corners() {
        // bright square on dark ground: FAST fires at each of the 4 corners
        let img = GrayImage::from_fn(FrameSpec::new(96, 96).unwrap(), |x, y| {
            if (30..66).contains(&x) && (30..66).contains(&y) {
                200
            } else {
                20
            }
        });
        let params = StitchParams { pyramid_levels: 1, ..StitchParams::default() };
        let kps = detect_orb(&img, &params).unwrap();
        assert_eq!(kps.len(), 4, "{kps:?}");
        for (kp, _) in &kps {
            let near = |v: f64| (v - 30.0).abs() <= 1.5 || (v - 65.0).abs() <= 1.5;
            assert!(near(kp.x) && near(kp.y), "{kp:?}");
            assert!(kp.orientation.abs() <= std::f64::consts::PI);
        }
    }

    #[test]
    fn checkerboard_keypoints_sit_on_lattice_corners() {
        // a bounded board: its outer and border junctions are FAST corners
        let rig = HeadCameraRig::default().with_yaw(5.0);
        let depth = 36.8;
        let cell = 3.0;
        let scene = PlanarScene::new(Pattern::Checkerboard { cell_cm: cell }, depth, [15.0, 15.0]).unwrap();
        let img = render_view(&rig, Side::Left, &scene, FrameSpec::QVGA).unwrap();
        let kps = detect_orb(&img, &StitchParams::default()).unwrap();
        assert!(kps.len() >= 8, "{}", kps.len());
        let cam = PinholeCamera::new(&rig, Side::Left, FrameSpec::QVGA);
        // cells are centered on the axis, so lattice lines sit at half-cell offsets
        let mut corners = Vec::new();
        for i in -3..=2 {
            for j in -3..=2 {
                let (x, y) = ((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
                corners.extend(cam.project(x, y, depth));
            }
        }
        let good = kps
            .iter()
            .filter(|(kp, _)| corners.iter().any(|&(u, v)| (kp.x - u).hypot(kp.y - v) <= 1.5))
            .count();
        assert!(good as f64 >= 0.8 * kps.len() as f64, "{good} of {}", kps.len());
    }

    #[test]
    fn output_is_capped_and_ordered() {
        let img = text_view();
        let params = StitchParams { max_keypoints: 100, ..StitchParams::default() };
        let kps = detect_orb(&img, &params).unwrap();
        assert_eq!(kps.len(), 100);
        for w in kps.windows(2) {
            assert!(w[0].0.response >= w[1].0.response);
        }
        assert_eq!(kps, detect_orb(&img, &params).unwrap());
    }

    #[test]
    fn textured_view_has_plenty_of_features() {
        let kps = detect_orb(&text_view(), &StitchParams::default()).unwrap();
        assert!(kps.len() >= 200, "{}", kps.len());
        let octaves: std::collections::BTreeSet<u8> = kps.iter().map(|(k, _)| k.octave).collect();
        assert!(octaves.len() > 1);
    }

    #[test]
    fn descriptors_survive_quarter_turn() {
        let img = text_view();
        let rot = img.rotated_cw();
        let params = StitchParams::default();
        let a = detect_orb(&img, &params).unwrap();
        let b = detect_orb(&rot, &params).unwrap();
        let h = img.height() as f64;
        let matches = super::super::match_descriptors(
            &a.iter().map(|k| k.1).collect::<Vec<_>>(),
            &b.iter().map(|k| k.1).collect::<Vec<_>>(),
            params.max_hamming,
        );
        // rotated_cw sends (x, y) to (h - 1 - y, x)
        let correct = matches
            .iter()
            .filter(|m| {
                let (p, q) = (&a[m.index_a].0, &b[m.index_b].0);
                (h - 1.0 - p.y - q.x).hypot(p.x - q.y) <= 2.0
            })
            .count();
        assert!(correct as f64 >= 0.6 * matches.len() as f64, "{correct} of {}", matches.len());
        assert!(correct >= 100, "{correct}");
    }
}
