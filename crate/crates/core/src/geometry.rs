//! Binocular field-of-view model for a pair of ear-mounted cameras.
//!
//! Coordinates are head-centric: the origin sits on the frontal axis midway
//! between the eyes, `x` points to the wearer's right and `z` points forward.
//! The two optical centers sit at `(±half_spacing, -posterior_offset)` and
//! each camera is yawed outward by the same angle. Every camera sees a
//! symmetric horizontal window of `window_fov` degrees about its axis.
//!
//! All angles cross the public interface in degrees and are converted to
//! radians before any trigonometry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Reference design-space rows: outward yaw (degrees) against the measured
/// forward blind spot (cm). Used as calibration targets.
pub const REFERENCE_BLIND_SPOTS: [(f64, f64); 5] = [
    (0.0, 14.1),
    (5.0, 18.6),
    (10.0, 24.7),
    (15.0, 34.0),
    (20.0, 50.7),
];

/// Reference overlap fractions at the Harmon distance for the rows above;
/// `None` where the published table reports no overlap.
pub const REFERENCE_OVERLAPS: [Option<f64>; 5] = [Some(0.64), Some(0.46), Some(0.28), Some(0.14), None];

/// Average comfortable reading distance in cm.
pub const HARMON_DISTANCE_CM: f64 = 36.8;

/// Header of the design-space CSV table.
pub const DESIGN_SPACE_CSV_HEADER: &str =
    "theta_deg,blind_spot_cm,added_fov_deg,binocular_fov_deg,overlap_harmon_pct";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid rig: {0}")]
    InvalidRig(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("calibration needs at least two rows with distinct yaw below the half window")]
    UnderdeterminedCalibration,
    #[error("calibration did not converge: max residual {max_residual:.3} cm exceeds 1 cm")]
    NoConvergence { max_residual: f64 },
    #[error("malformed design-space csv at line {line}: {msg}")]
    MalformedCsv { line: usize, msg: String },
}

/// Parametric camera placement on the head.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct HeadCameraRig<T> {
    /// Half of the lateral distance between the two optical centers (cm).
    pub half_spacing_cm: T,
    /// Distance the camera plane sits behind the eye-center origin (cm).
    pub posterior_offset_cm: T,
    /// Outward yaw of each camera from straight ahead (degrees).
    pub yaw_deg: T,
    /// Per-camera horizontal field of view after windowed readout (degrees).
    pub window_fov_deg: T,
    /// Full horizontal field of view of the sensor (degrees).
    pub sensor_fov_deg: T,
    /// Tabulated binocular coverage at zero yaw (degrees).
    pub base_union_deg: T,
}

impl<T: Scalar> Default for HeadCameraRig<T> {
    /// The rig fitted to [`REFERENCE_BLIND_SPOTS`] at zero yaw.
    fn default() -> Self {
        Self {
            half_spacing_cm: T::lit(9.918),
            posterior_offset_cm: T::lit(5.325),
            yaw_deg: T::zero(),
            window_fov_deg: T::lit(65.0),
            sensor_fov_deg: T::lit(87.0),
            base_union_deg: T::lit(88.0),
        }
    }
}

impl<T: Scalar> HeadCameraRig<T> {
    pub fn with_yaw(mut self, yaw_deg: T) -> Self {
        self.yaw_deg = yaw_deg;
        self
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let finite = [
            self.half_spacing_cm,
            self.posterior_offset_cm,
            self.yaw_deg,
            self.window_fov_deg,
            self.sensor_fov_deg,
            self.base_union_deg,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(GeometryError::InvalidRig("non-finite parameter".into()));
        }
        if self.half_spacing_cm < T::zero() {
            return Err(GeometryError::InvalidRig("half spacing must be non-negative".into()));
        }
        if self.yaw_deg < T::zero() {
            return Err(GeometryError::InvalidRig("yaw must be non-negative".into()));
        }
        let full = T::lit(180.0);
        if !(self.window_fov_deg > T::zero()
            && self.window_fov_deg <= self.sensor_fov_deg
            && self.sensor_fov_deg < full)
        {
            return Err(GeometryError::InvalidRig(
                "require 0 < window fov <= sensor fov < 180".into(),
            ));
        }
        Ok(())
    }

    /// Half of the window field of view, in degrees.
    pub fn half_window_deg(&self) -> T {
        self.window_fov_deg / T::lit(2.0)
    }
}

/// Test object and reference distance for blind-spot queries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct BlindSpotQuery<T> {
    pub object_width_cm: T,
    pub harmon_distance_cm: T,
}

impl<T: Scalar> Default for BlindSpotQuery<T> {
    fn default() -> Self {
        Self {
            object_width_cm: T::lit(5.0),
            harmon_distance_cm: T::lit(HARMON_DISTANCE_CM),
        }
    }
}

impl<T: Scalar> BlindSpotQuery<T> {
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.object_width_cm > T::zero() && self.object_width_cm.is_finite()) {
            return Err(GeometryError::InvalidQuery("object width must be positive".into()));
        }
        if !(self.harmon_distance_cm > T::zero() && self.harmon_distance_cm.is_finite()) {
            return Err(GeometryError::InvalidQuery("harmon distance must be positive".into()));
        }
        Ok(())
    }
}

/// Forward blind-spot length. `Infinite` when the inner rays never cross.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BlindSpot<T> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> BlindSpot<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            BlindSpot::Finite(v) => Some(v),
            BlindSpot::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, BlindSpot::Infinite)
    }
}

impl<T: Scalar> fmt::Display for BlindSpot<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlindSpot::Finite(v) => write!(f, "{:.3}", v.as_f64()),
            BlindSpot::Infinite => f.write_str("inf"),
        }
    }
}

/// Forward blind spot: the distance from the eye center at which a midline
/// object first fits entirely inside both cameras' windows.
///
/// Each camera's inner boundary ray leaves its optical center at
/// `half_window - yaw` from straight ahead and must reach past the far edge
/// of the object, giving
/// `L = (half_spacing + width/2) / tan(half_window - yaw) - posterior_offset`,
/// clamped at zero.
pub fn blind_spot_length<T: Scalar>(
    rig: &HeadCameraRig<T>,
    query: &BlindSpotQuery<T>,
) -> Result<BlindSpot<T>, GeometryError> {
    rig.validate()?;
    query.validate()?;
    let inner = (rig.half_window_deg() - rig.yaw_deg).to_radians();
    if inner <= T::zero() {
        return Ok(BlindSpot::Infinite);
    }
    let reach = rig.half_spacing_cm + query.object_width_cm / T::lit(2.0);
    let length = reach / inner.tan() - rig.posterior_offset_cm;
    Ok(BlindSpot::Finite(length.max(T::zero())))
}

/// Binocular field of view in the tabulated convention: `base_union + 2·yaw`.
pub fn binocular_fov<T: Scalar>(rig: &HeadCameraRig<T>) -> T {
    rig.base_union_deg + T::lit(2.0) * rig.yaw_deg
}

/// Geometric union of the two windows: `window_fov + 2·yaw`.
pub fn model_union_fov<T: Scalar>(rig: &HeadCameraRig<T>) -> T {
    rig.window_fov_deg + T::lit(2.0) * rig.yaw_deg
}

/// Horizontal interval `[lo, hi]` (cm) covered by one camera on the frontal
/// plane at `distance_from_eye`. `side` is -1 for the left camera, +1 for the
/// right camera. Returns `None` if the plane is not in front of the camera.
pub fn coverage_interval<T: Scalar>(
    rig: &HeadCameraRig<T>,
    side: i8,
    distance_from_eye: T,
) -> Option<(T, T)> {
    let depth = distance_from_eye + rig.posterior_offset_cm;
    if depth <= T::zero() {
        return None;
    }
    let half = rig.half_window_deg().to_radians();
    let yaw = rig.yaw_deg.to_radians();
    let quarter = T::lit(std::f64::consts::FRAC_PI_2);
    let outer_angle = half + yaw;
    let outer = if outer_angle >= quarter {
        T::infinity()
    } else {
        depth * outer_angle.tan()
    };
    let inner = depth * (half - yaw).tan();
    let center = rig.half_spacing_cm;
    if side < 0 {
        Some((-center - outer, -center + inner))
    } else {
        Some((center - inner, center + outer))
    }
}

/// Fraction of a single camera's coverage that is also seen by the other
/// camera on the frontal plane at `distance_from_eye`. `None` when the two
/// coverage intervals are disjoint.
pub fn overlap_at_distance<T: Scalar>(
    rig: &HeadCameraRig<T>,
    distance_from_eye: T,
) -> Result<Option<T>, GeometryError> {
    rig.validate()?;
    if !(distance_from_eye > T::zero()) {
        return Err(GeometryError::InvalidQuery("distance must be positive".into()));
    }
    let (Some(left), Some(right)) = (
        coverage_interval(rig, -1, distance_from_eye),
        coverage_interval(rig, 1, distance_from_eye),
    ) else {
        return Ok(None);
    };
    let lo = left.0.max(right.0);
    let hi = left.1.min(right.1);
    let common = hi - lo;
    if !(common > T::zero()) {
        return Ok(None);
    }
    let single = right.1 - right.0;
    if single.is_infinite() {
        return Ok(Some(T::zero()));
    }
    Ok(Some((common / single).min(T::one())))
}

/// A fitted rig plus the per-row residuals (model − target, cm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct Calibration<T> {
    pub rig: HeadCameraRig<T>,
    pub residuals: Vec<T>,
    pub max_residual: T,
}

/// Fits half spacing and posterior offset to `(yaw_deg, blind_spot_cm)`
/// targets, keeping the window parameters of `template`.
///
/// The blind-spot model is affine in `(half_spacing + width/2, offset)` for
/// fixed yaw, so the least-squares fit is solved exactly from the 2×2 normal
/// equations. Fails with [`GeometryError::NoConvergence`] when any row is
/// more than 1 cm off the fitted curve.
pub fn calibrate_rig<T: Scalar>(
    targets: &[(T, T)],
    template: &HeadCameraRig<T>,
    query: &BlindSpotQuery<T>,
) -> Result<Calibration<T>, GeometryError> {
    template.validate()?;
    query.validate()?;
    let half = template.half_window_deg();
    if targets.iter().any(|&(yaw, _)| !(yaw >= T::zero() && yaw < half)) {
        return Err(GeometryError::UnderdeterminedCalibration);
    }
    let mut distinct: Vec<f64> = targets.iter().map(|(y, _)| y.as_f64()).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(GeometryError::UnderdeterminedCalibration);
    }

    // L_i = reach * c_i - offset, with c_i = cot(half - yaw_i)
    let n = T::from_usize(targets.len()).unwrap_or_else(T::one);
    let cots: Vec<T> = targets
        .iter()
        .map(|&(yaw, _)| T::one() / (half - yaw).to_radians().tan())
        .collect();
    let sum_c = cots.iter().fold(T::zero(), |acc, &c| acc + c);
    let sum_cc = cots.iter().fold(T::zero(), |acc, &c| acc + c * c);
    let sum_l = targets.iter().fold(T::zero(), |acc, &(_, l)| acc + l);
    let sum_cl = cots
        .iter()
        .zip(targets)
        .fold(T::zero(), |acc, (&c, &(_, l))| acc + c * l);
    let det = n * sum_cc - sum_c * sum_c;
    let reach = (n * sum_cl - sum_c * sum_l) / det;
    let offset = (sum_c * sum_cl - sum_cc * sum_l) / det;

    let half_spacing = reach - query.object_width_cm / T::lit(2.0);
    if !(half_spacing >= T::zero()) || !reach.is_finite() || !offset.is_finite() {
        return Err(GeometryError::NoConvergence { max_residual: f64::INFINITY });
    }
    let rig = HeadCameraRig {
        half_spacing_cm: half_spacing,
        posterior_offset_cm: offset,
        ..*template
    };
    let mut residuals = Vec::with_capacity(targets.len());
    for &(yaw, target) in targets {
        let predicted = blind_spot_length(&rig.with_yaw(yaw), query)?
            .finite()
            .unwrap_or_else(T::infinity);
        residuals.push(predicted - target);
    }
    let max_residual = residuals.iter().fold(T::zero(), |m, r| m.max(r.abs()));
    if max_residual > T::one() {
        return Err(GeometryError::NoConvergence { max_residual: max_residual.as_f64() });
    }
    Ok(Calibration { rig, residuals, max_residual })
}

/// Calibrates against [`REFERENCE_BLIND_SPOTS`] with the default window.
pub fn calibrate_reference<T: Scalar>() -> Result<Calibration<T>, GeometryError> {
    let targets: Vec<(T, T)> = REFERENCE_BLIND_SPOTS
        .iter()
        .map(|&(y, l)| (T::lit(y), T::lit(l)))
        .collect();
    calibrate_rig(&targets, &HeadCameraRig::default(), &BlindSpotQuery::default())
}

/// One row of the orientation design space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpaceRow<T> {
    pub theta_deg: T,
    pub blind_spot: BlindSpot<T>,
    pub added_fov_deg: T,
    pub binocular_fov_deg: T,
    /// Overlap fraction at the Harmon distance, `None` when absent.
    pub overlap_at_harmon: Option<T>,
}

pub fn design_space_table<T: Scalar>(
    rig: &HeadCameraRig<T>,
    thetas: &[T],
    query: &BlindSpotQuery<T>,
) -> Result<Vec<DesignSpaceRow<T>>, GeometryError> {
    thetas
        .iter()
        .map(|&theta| {
            let oriented = rig.with_yaw(theta);
            Ok(DesignSpaceRow {
                theta_deg: theta,
                blind_spot: blind_spot_length(&oriented, query)?,
                added_fov_deg: T::lit(2.0) * theta,
                binocular_fov_deg: binocular_fov(&oriented),
                overlap_at_harmon: overlap_at_distance(&oriented, query.harmon_distance_cm)?,
            })
        })
        .collect()
}

pub fn design_space_to_csv<T: Scalar>(rows: &[DesignSpaceRow<T>]) -> String {
    let mut out = String::from(DESIGN_SPACE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let overlap = row
            .overlap_at_harmon
            .map(|o| format!("{:.2}", o.as_f64() * 100.0))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.theta_deg.as_f64(),
            row.blind_spot,
            row.added_fov_deg.as_f64(),
            row.binocular_fov_deg.as_f64(),
            overlap
        ));
    }
    out
}

pub fn design_space_from_csv(text: &str) -> Result<Vec<DesignSpaceRow<f64>>, GeometryError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == DESIGN_SPACE_CSV_HEADER => {}
        _ => {
            return Err(GeometryError::MalformedCsv { line: 1, msg: "missing header".into() });
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| GeometryError::MalformedCsv { line: idx + 1, msg: msg.to_string() };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad("expected 5 fields"));
        }
        let num = |s: &str| f64::from_str(s.trim()).map_err(|_| bad("not a number"));
        let blind = num(fields[1])?;
        rows.push(DesignSpaceRow {
            theta_deg: num(fields[0])?,
            blind_spot: if blind.is_infinite() {
                BlindSpot::Infinite
            } else {
                BlindSpot::Finite(blind)
            },
            added_fov_deg: num(fields[2])?,
            binocular_fov_deg: num(fields[3])?,
            overlap_at_harmon: if fields[4].trim().is_empty() {
                None
            } else {
                Some(num(fields[4])? / 100.0)
            },
        });
    }
    Ok(rows)
}
