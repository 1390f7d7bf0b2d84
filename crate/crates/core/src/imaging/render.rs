//! Pinhole rendering of planar scenes from the two ear-mounted cameras.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::{FrameSpec, GrayImage, ImagingError, PlanarScene};
use crate::geometry::{BlindSpotQuery, HeadCameraRig};
use crate::homography::Homography;
use crate::imaging::scene::{Pattern, OBJECT_VALUE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }
}

/// One camera of the rig in head coordinates.
///
/// Pixel `(u, v)` has its center at integer coordinates; the principal point
/// is the image center `((w-1)/2, (h-1)/2)`, so the outer pixel edges sit
/// exactly at ±half the window field of view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinholeCamera {
    pub center_x: f64,
    pub center_z: f64,
    sin_yaw: f64,
    cos_yaw: f64,
    pub focal_px: f64,
    pub cx: f64,
    pub cy: f64,
}

impl PinholeCamera {
    pub fn new(rig: &HeadCameraRig<f64>, side: Side, spec: FrameSpec) -> Self {
        let yaw = rig.yaw_deg.to_radians();
        let half = (rig.window_fov_deg / 2.0).to_radians();
        PinholeCamera {
            center_x: side.sign() * rig.half_spacing_cm,
            center_z: -rig.posterior_offset_cm,
            sin_yaw: side.sign() * yaw.sin(),
            cos_yaw: yaw.cos(),
            focal_px: (spec.width as f64 / 2.0) / half.tan(),
            cx: (spec.width as f64 - 1.0) / 2.0,
            cy: (spec.height as f64 - 1.0) / 2.0,
        }
    }

    /// Pixel coordinates of a head-frame point, `None` behind the camera.
    pub fn project(&self, x: f64, y: f64, z: f64) -> Option<(f64, f64)> {
        let (dx, dz) = (x - self.center_x, z - self.center_z);
        let xc = self.cos_yaw * dx - self.sin_yaw * dz;
        let zc = self.sin_yaw * dx + self.cos_yaw * dz;
        if zc <= 0.0 {
            return None;
        }
        Some((self.focal_px * xc / zc + self.cx, self.focal_px * y / zc + self.cy))
    }

    /// Intersection of the ray through pixel `(u, v)` with the plane
    /// `z = depth`, as plane coordinates `(x, y)`.
    pub fn backproject_to_plane(&self, u: f64, v: f64, depth: f64) -> Option<(f64, f64)> {
        let xc = (u - self.cx) / self.focal_px;
        let yc = (v - self.cy) / self.focal_px;
        let dx = self.cos_yaw * xc + self.sin_yaw;
        let dz = -self.sin_yaw * xc + self.cos_yaw;
        if dz <= 0.0 {
            return None;
        }
        let t = (depth - self.center_z) / dz;
        if t <= 0.0 {
            return None;
        }
        Some((self.center_x + t * dx, t * yc))
    }

    fn intrinsics(&self) -> Matrix3<f64> {
        Matrix3::new(self.focal_px, 0.0, self.cx, 0.0, self.focal_px, self.cy, 0.0, 0.0, 1.0)
    }

    /// Homography taking plane coordinates `(x, y, 1)` on `z = depth` to
    /// homogeneous pixel coordinates.
    fn plane_to_image(&self, depth: f64) -> Matrix3<f64> {
        let world_to_cam = Matrix3::new(
            self.cos_yaw, 0.0, -self.sin_yaw,
            0.0, 1.0, 0.0,
            self.sin_yaw, 0.0, self.cos_yaw,
        );
        let offset = Matrix3::new(
            1.0, 0.0, -self.center_x,
            0.0, 1.0, 0.0,
            0.0, 0.0, depth - self.center_z,
        );
        self.intrinsics() * world_to_cam * offset
    }
}

fn check_in_front(rig: &HeadCameraRig<f64>, depth: f64) -> Result<(), ImagingError> {
    if !(depth + rig.posterior_offset_cm > 0.0) {
        return Err(ImagingError::PlaneBehindCamera);
    }
    Ok(())
}

pub fn render_view(
    rig: &HeadCameraRig<f64>,
    side: Side,
    scene: &PlanarScene,
    spec: FrameSpec,
) -> Result<GrayImage, ImagingError> {
    rig.validate().map_err(|e| ImagingError::InvalidScene(e.to_string()))?;
    scene.validate()?;
    check_in_front(rig, scene.depth_cm)?;
    let cam = PinholeCamera::new(rig, side, spec);
    Ok(GrayImage::from_fn(spec, |u, v| {
        match cam.backproject_to_plane(u as f64, v as f64, scene.depth_cm) {
            Some((x, y)) => scene.sample(x, y),
            None => 0,
        }
    }))
}

pub fn render_pair(
    rig: &HeadCameraRig<f64>,
    scene: &PlanarScene,
    spec: FrameSpec,
) -> Result<(GrayImage, GrayImage), ImagingError> {
    Ok((
        render_view(rig, Side::Left, scene, spec)?,
        render_view(rig, Side::Right, scene, spec)?,
    ))
}

/// Homography mapping RIGHT-view pixels to LEFT-view pixels for a
/// fronto-parallel plane at `scene_depth` cm from the eyes.
pub fn ground_truth_homography(
    rig: &HeadCameraRig<f64>,
    scene_depth: f64,
    spec: FrameSpec,
) -> Result<Homography, ImagingError> {
    check_in_front(rig, scene_depth)?;
    let left = PinholeCamera::new(rig, Side::Left, spec).plane_to_image(scene_depth);
    let right = PinholeCamera::new(rig, Side::Right, spec).plane_to_image(scene_depth);
    let right_inv = right.try_inverse().ok_or(ImagingError::PlaneBehindCamera)?;
    Homography::from_matrix(left * right_inv).ok_or(ImagingError::PlaneBehindCamera)
}

/// True when the middle row shows the midline object with background on
/// both sides of it, i.e. neither object edge is cut by the image border.
fn object_fully_visible(img: &GrayImage) -> bool {
    let row = img.row(img.height() / 2);
    let first = row.first() == Some(&OBJECT_VALUE);
    let last = row.last() == Some(&OBJECT_VALUE);
    row.contains(&OBJECT_VALUE) && !first && !last
}

/// Moves a midline object away from the eyes in `step_cm` increments and
/// returns the first distance at which both rendered views contain it in
/// full. Fails with [`ImagingError::NotFound`] past 500 cm.
pub fn simulate_blind_spot(
    rig: &HeadCameraRig<f64>,
    query: &BlindSpotQuery<f64>,
    step_cm: f64,
) -> Result<f64, ImagingError> {
    const LIMIT_CM: f64 = 500.0;
    if !(step_cm > 0.0 && step_cm <= 0.5) {
        return Err(ImagingError::InvalidScene("step must be in (0, 0.5] cm".into()));
    }
    query.validate().map_err(|e| ImagingError::InvalidScene(e.to_string()))?;
    let spec = FrameSpec::QVGA;
    let mut k = 1u32;
    loop {
        let distance = step_cm * k as f64;
        if distance > LIMIT_CM {
            return Err(ImagingError::NotFound);
        }
        k += 1;
        if distance + rig.posterior_offset_cm <= 0.0 {
            continue;
        }
        let scene = PlanarScene {
            pattern: Pattern::Flat { value: 64 },
            depth_cm: distance,
            extent_cm: [4.0 * LIMIT_CM, 4.0 * LIMIT_CM],
            object_width_cm: Some(query.object_width_cm),
        };
        let (left, right) = render_pair(rig, &scene, spec)?;
        if object_fully_visible(&left) && object_fully_visible(&right) {
            return Ok(distance);
        }
    }
}
