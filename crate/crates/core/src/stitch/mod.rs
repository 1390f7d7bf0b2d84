//! Feature-based stitching of the two ear views with a confidence gate that
//! falls back to sending both frames.

mod composite;
mod matching;
mod orb;
mod pattern;
mod ransac;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homography::Homography;
use crate::imaging::GrayImage;

pub use composite::{canvas_for, composite, Canvas, Panorama};
pub use matching::{match_descriptors, Match};
pub use orb::{detect_orb, Descriptor256, Keypoint, MIN_IMAGE_SIDE};
pub use ransac::{estimate_homography_ransac, fit_homography, Point};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StitchError {
    #[error("image {width}x{height} is smaller than 32x32")]
    ImageTooSmall { width: usize, height: usize },
    #[error("no homography with enough inliers")]
    RansacFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StitchParams {
    pub fast_threshold: u8,
    pub pyramid_levels: usize,
    pub pyramid_scale: f64,
    pub max_keypoints: usize,
    pub max_hamming: u32,
    pub ransac_threshold_px: f64,
    pub ransac_max_iterations: usize,
    pub ransac_confidence: f64,
    pub min_inliers: usize,
    pub min_features: usize,
    pub min_matches: usize,
    /// Smallest accepted determinant of the upper-left 2×2 block.
    pub min_linear_det: f64,
    /// Largest accepted magnitude of the perspective entries.
    pub max_perspective: f64,
    pub min_inlier_ratio: f64,
}

impl Default for StitchParams {
    fn default() -> Self {
        StitchParams {
            fast_threshold: 20,
            pyramid_levels: 4,
            pyramid_scale: 1.2,
            max_keypoints: 500,
            max_hamming: 64,
            ransac_threshold_px: 3.0,
            ransac_max_iterations: 1000,
            ransac_confidence: 0.99,
            min_inliers: 15,
            min_features: 50,
            min_matches: 15,
            min_linear_det: 0.1,
            max_perspective: 0.01,
            min_inlier_ratio: 0.3,
        }
    }
}

pub const DEFAULT_STITCH_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FallbackReason {
    InsufficientFeatures,
    InsufficientMatches,
    RansacFailed,
    SanityRejected,
}

impl FallbackReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FallbackReason::InsufficientFeatures => "INSUFFICIENT_FEATURES",
            FallbackReason::InsufficientMatches => "INSUFFICIENT_MATCHES",
            FallbackReason::RansacFailed => "RANSAC_FAILED",
            FallbackReason::SanityRejected => "SANITY_REJECTED",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StitchResult {
    Stitched {
        panorama: Panorama,
        /// Maps right-frame pixels into left-frame pixels.
        h: Homography,
        inliers: usize,
        matches: usize,
        inlier_ratio: f64,
    },
    Fallback {
        reason: FallbackReason,
        /// Best homography found before the gate failed, if any.
        h: Option<Homography>,
        inliers: usize,
        matches: usize,
    },
}

impl StitchResult {
    pub fn is_stitched(&self) -> bool {
        matches!(self, StitchResult::Stitched { .. })
    }

    pub fn homography(&self) -> Option<&Homography> {
        match self {
            StitchResult::Stitched { h, .. } => Some(h),
            StitchResult::Fallback { h, .. } => h.as_ref(),
        }
    }

    pub fn reason(&self) -> Option<FallbackReason> {
        match self {
            StitchResult::Stitched { .. } => None,
            StitchResult::Fallback { reason, .. } => Some(*reason),
        }
    }
}

/// Rejects reflections and strong perspective.
pub fn passes_sanity_gate(h: &Homography, inlier_ratio: f64, params: &StitchParams) -> bool {
    let m = h.matrix();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    det > params.min_linear_det
        && m[(2, 0)].abs() < params.max_perspective
        && m[(2, 1)].abs() < params.max_perspective
        && inlier_ratio >= params.min_inlier_ratio
}

fn fallback(reason: FallbackReason, h: Option<Homography>, inliers: usize, matches: usize) -> StitchResult {
    StitchResult::Fallback { reason, h, inliers, matches }
}

/// Stitches `right` onto `left` when the estimate is trustworthy, otherwise
/// reports why both frames should be kept.
pub fn try_stitch(left: &GrayImage, right: &GrayImage, params: &StitchParams, seed: u64) -> StitchResult {
    let (Ok(fl), Ok(fr)) = (detect_orb(left, params), detect_orb(right, params)) else {
        return fallback(FallbackReason::InsufficientFeatures, None, 0, 0);
    };
    if fl.len() < params.min_features || fr.len() < params.min_features {
        return fallback(FallbackReason::InsufficientFeatures, None, 0, 0);
    }
    let dl: Vec<Descriptor256> = fl.iter().map(|f| f.1).collect();
    let dr: Vec<Descriptor256> = fr.iter().map(|f| f.1).collect();
    let matches = match_descriptors(&dr, &dl, params.max_hamming);
    if matches.len() < params.min_matches {
        return fallback(FallbackReason::InsufficientMatches, None, 0, matches.len());
    }
    let src: Vec<Point> = matches.iter().map(|m| (fr[m.index_a].0.x, fr[m.index_a].0.y)).collect();
    let dst: Vec<Point> = matches.iter().map(|m| (fl[m.index_b].0.x, fl[m.index_b].0.y)).collect();
    let (h, mask) = match estimate_homography_ransac(&src, &dst, params, seed) {
        Ok(v) => v,
        Err(_) => return fallback(FallbackReason::RansacFailed, None, 0, matches.len()),
    };
    let inliers = mask.iter().filter(|&&m| m).count();
    let inlier_ratio = inliers as f64 / matches.len() as f64;
    if !passes_sanity_gate(&h, inlier_ratio, params) {
        return fallback(FallbackReason::SanityRejected, Some(h), inliers, matches.len());
    }
    match composite(left, right, &h) {
        Some(panorama) => StitchResult::Stitched { panorama, h, inliers, matches: matches.len(), inlier_ratio },
        None => fallback(FallbackReason::SanityRejected, Some(h), inliers, matches.len()),
    }
}

/// Machine-readable summary of one stitch attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StitchReport {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<FallbackReason>,
    pub inliers: usize,
    pub inlier_ratio: f64,
    pub h: Option<[f64; 9]>,
    /// Wall-clock time, present only when timing was requested since it
    /// varies between runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
    pub pixels_in: usize,
    /// Pixels handed downstream: the panorama canvas, or both frames on
    /// fallback.
    pub pixels_out: usize,
    /// Pixels of `pixels_out` that carry image content.
    pub pixels_covered: usize,
}

impl StitchReport {
    pub fn new(result: &StitchResult, left: &GrayImage, right: &GrayImage, runtime_ms: Option<f64>) -> Self {
        let pixels_in = left.pixels().len() + right.pixels().len();
        match result {
            StitchResult::Stitched { panorama, h, inliers, inlier_ratio, .. } => StitchReport {
                status: "STITCHED".into(),
                reason: None,
                inliers: *inliers,
                inlier_ratio: *inlier_ratio,
                h: Some(h.to_row_major()),
                runtime_ms,
                pixels_in,
                pixels_out: panorama.image.pixels().len(),
                pixels_covered: panorama.covered,
            },
            StitchResult::Fallback { reason, h, inliers, matches } => StitchReport {
                status: "FALLBACK".into(),
                reason: Some(*reason),
                inliers: *inliers,
                inlier_ratio: if *matches > 0 { *inliers as f64 / *matches as f64 } else { 0.0 },
                h: h.map(|h| h.to_row_major()),
                runtime_ms,
                pixels_in,
                pixels_out: pixels_in,
                pixels_covered: pixels_in,
            },
        }
    }
}

/// Mean absolute gray-level difference between `left` and `right` warped by
/// `right_to_left`, over pixels both frames cover.
pub fn overlap_error(left: &GrayImage, right: &GrayImage, right_to_left: &Homography) -> Option<f64> {
    let inv = right_to_left.inverse()?;
    let (mut sum, mut n) = (0.0, 0usize);
    for y in 0..left.height() {
        for x in 0..left.width() {
            if let Some(r) = composite::sample_right(right, &inv, x as f64, y as f64) {
                sum += (left.get(x, y) as f64 - r as f64).abs();
                n += 1;
            }
        }
    }
    (n > 0).then(|| sum / n as f64)
}
