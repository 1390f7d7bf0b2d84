//! Frame formats, the PGM codec and a synthetic stereo renderer.

mod frame;
mod pgm;
mod render;
mod scene;

use thiserror::Error;

pub use frame::{FramePreset, FrameSpec, GrayImage};
pub use pgm::{decode_pgm, encode_pgm};
pub use render::{
    ground_truth_homography, render_pair, render_view, simulate_blind_spot, PinholeCamera, Side,
};
pub use scene::{Pattern, PlanarScene, OBJECT_VALUE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImagingError {
    #[error("invalid frame: {0}")]
    InvalidSpec(String),
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("scene plane is not in front of the camera")]
    PlaneBehindCamera,
    #[error("malformed pgm header: {0}")]
    MalformedHeader(String),
    #[error("truncated pgm payload: expected {expected} bytes, got {got}")]
    TruncatedPayload { expected: usize, got: usize },
    #[error("object never fully visible within the search range")]
    NotFound,
}
