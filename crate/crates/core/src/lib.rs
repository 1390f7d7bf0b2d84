//! Modeling and simulation toolkit for camera-integrated wireless earbuds:
//! camera geometry, synthetic imaging, the streaming link, power, stitching
//! and the end-to-end query pipeline.
//!
//! The closed-form geometry and power models are generic over [`Scalar`]
//! (`f32` or `f64`); the aliases below fix them to `f64`.

pub mod config;
pub mod geometry;
pub mod homography;
pub mod imaging;
pub mod link;
pub mod pipeline;
pub mod power;
pub mod scalar;
pub mod stitch;

pub use scalar::Scalar;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type HeadCameraRig = geometry::HeadCameraRig<f64>;
pub type BlindSpotQuery = geometry::BlindSpotQuery<f64>;
pub type BlindSpot = geometry::BlindSpot<f64>;
pub type Calibration = geometry::Calibration<f64>;
pub type DesignSpaceRow = geometry::DesignSpaceRow<f64>;
pub type PowerProfile = power::PowerProfile<f64>;
pub type BatteryModel = power::BatteryModel<f64>;
pub type LifeRow = power::LifeRow<f64>;
