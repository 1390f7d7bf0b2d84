//! Homography fitting: normalized DLT and seeded RANSAC.

use nalgebra::{DMatrix, Matrix3};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{StitchError, StitchParams};
use crate::homography::Homography;

pub type Point = (f64, f64);

/// Similarity moving the centroid to the origin with mean distance √2.
fn normalizer(pts: &[Point]) -> Option<Matrix3<f64>> {
    let n = pts.len() as f64;
    let (cx, cy) = pts.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.0, sy + p.1));
    let (cx, cy) = (cx / n, cy / n);
    let mean = pts.iter().map(|p| (p.0 - cx).hypot(p.1 - cy)).sum::<f64>() / n;
    if mean < 1e-12 {
        return None;
    }
    let s = std::f64::consts::SQRT_2 / mean;
    Some(Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0))
}

fn transform(t: &Matrix3<f64>, p: Point) -> Point {
    (t[(0, 0)] * p.0 + t[(0, 2)], t[(1, 1)] * p.1 + t[(1, 2)])
}

/// Least-squares homography mapping `src` onto `dst` (at least 4 pairs).
pub fn fit_homography(src: &[Point], dst: &[Point]) -> Option<Homography> {
    let n = src.len();
    if n < 4 || dst.len() != n {
        return None;
    }
    let ts = normalizer(src)?;
    let td = normalizer(dst)?;
    // pad to a square system so the SVD always exposes the null vector
    let rows = (2 * n).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for i in 0..n {
        let (x, y) = transform(&ts, src[i]);
        let (u, v) = transform(&td, dst[i]);
        let r = 2 * i;
        a.row_mut(r).copy_from_slice(&[-x, -y, -1.0, 0.0, 0.0, 0.0, u * x, u * y, u]);
        a.row_mut(r + 1).copy_from_slice(&[0.0, 0.0, 0.0, -x, -y, -1.0, v * x, v * y, v]);
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t?;
    let (min_idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let h = v_t.row(min_idx);
    let hn = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]);
    let m = td.try_inverse()? * hn * ts;
    Homography::from_matrix(m)
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// True if any three of the four points are (nearly) collinear.
fn degenerate(p: [Point; 4]) -> bool {
    const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    TRIPLES.iter().any(|&[i, j, k]| {
        let scale = (p[j].0 - p[i].0).hypot(p[j].1 - p[i].1) * (p[k].0 - p[i].0).hypot(p[k].1 - p[i].1);
        cross(p[i], p[j], p[k]).abs() <= 1e-6 * scale.max(1e-12)
    })
}

fn reprojection_error(h: &Homography, s: Point, d: Point) -> f64 {
    match h.apply(s.0, s.1) {
        Some((x, y)) => (x - d.0).hypot(y - d.1),
        None => f64::INFINITY,
    }
}

fn inlier_mask(h: &Homography, src: &[Point], dst: &[Point], threshold: f64) -> Vec<bool> {
    src.iter().zip(dst).map(|(&s, &d)| reprojection_error(h, s, d) < threshold).collect()
}

/// Robust homography mapping `src` onto `dst` with its inlier mask.
///
/// Minimal samples whose source or target points include a collinear triple
/// are skipped. The best hypothesis is refit on its inliers by least squares,
/// repeated until the inlier set settles.
pub fn estimate_homography_ransac(
    src: &[Point],
    dst: &[Point],
    params: &StitchParams,
    seed: u64,
) -> Result<(Homography, Vec<bool>), StitchError> {
    let n = src.len();
    if n < 4 || dst.len() != n {
        return Err(StitchError::RansacFailed);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let threshold = params.ransac_threshold_px;
    let mut best: Option<(usize, Homography)> = None;
    let mut needed = params.ransac_max_iterations;
    let mut iter = 0;
    while iter < needed.min(params.ransac_max_iterations) {
        iter += 1;
        let idx = sample(&mut rng, n, 4);
        let s: [Point; 4] = std::array::from_fn(|i| src[idx.index(i)]);
        let d: [Point; 4] = std::array::from_fn(|i| dst[idx.index(i)]);
        if degenerate(s) || degenerate(d) {
            continue;
        }
        let Some(h) = fit_homography(&s, &d) else { continue };
        let count = inlier_mask(&h, src, dst, threshold).iter().filter(|&&b| b).count();
        if best.as_ref().is_none_or(|(c, _)| count > *c) {
            best = Some((count, h));
            let w = count as f64 / n as f64;
            let fail = 1.0 - w.powi(4);
            needed = if fail <= f64::EPSILON {
                iter
            } else {
                ((1.0 - params.ransac_confidence).ln() / fail.ln()).ceil().max(0.0) as usize
            };
        }
    }
    let (count, h) = best.ok_or(StitchError::RansacFailed)?;
    if count < params.min_inliers.max(4) {
        return Err(StitchError::RansacFailed);
    }
    // refit on the inliers until the inlier set stops changing
    let (mut h, mut mask) = (h, inlier_mask(&h, src, dst, threshold));
    let mut count = count;
    for _ in 0..5 {
        let (s, d): (Vec<Point>, Vec<Point>) =
            src.iter().zip(dst).zip(&mask).filter(|(_, &m)| m).map(|((&s, &d), _)| (s, d)).unzip();
        let Some(refit) = fit_homography(&s, &d) else { break };
        let refit_mask = inlier_mask(&refit, src, dst, threshold);
        let refit_count = refit_mask.iter().filter(|&&b| b).count();
        if refit_count < count {
            break;
        }
        let stable = refit_mask == mask;
        (h, mask, count) = (refit, refit_mask, refit_count);
        if stable {
            break;
        }
    }
    Ok((h, mask))
}
