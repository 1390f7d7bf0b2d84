use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

/// Planar projective transform acting on pixel coordinates, normalized so
/// the bottom-right entry is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography(Matrix3<f64>);

impl Homography {
    pub fn identity() -> Self {
        Homography(Matrix3::identity())
    }

    /// Normalizes by the (3,3) entry. Returns `None` if that entry vanishes
    /// or the matrix is not finite.
    pub fn from_matrix(m: Matrix3<f64>) -> Option<Self> {
        let s = m[(2, 2)];
        if s.abs() < 1e-14 || !m.iter().all(|v| v.is_finite()) {
            return None;
        }
        Some(Homography(m / s))
    }

    pub fn from_row_major(v: [f64; 9]) -> Option<Self> {
        Self::from_matrix(Matrix3::from_row_slice(&v))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)], m[(0, 1)], m[(0, 2)],
            m[(1, 0)], m[(1, 1)], m[(1, 2)],
            m[(2, 0)], m[(2, 1)], m[(2, 2)],
        ]
    }

    pub fn apply(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let p = self.0 * Vector3::new(x, y, 1.0);
        if p.z.abs() < 1e-12 {
            return None;
        }
        Some((p.x / p.z, p.y / p.z))
    }

    pub fn inverse(&self) -> Option<Self> {
        self.0.try_inverse().and_then(Self::from_matrix)
    }

    pub fn compose(&self, other: &Homography) -> Option<Self> {
        Self::from_matrix(self.0 * other.0)
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &Homography) -> f64 {
        (self.0 - other.0).abs().max()
    }
}

impl Serialize for Homography {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_row_major().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Homography {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = <[f64; 9]>::deserialize(d)?;
        Homography::from_row_major(v).ok_or_else(|| serde::de::Error::custom("degenerate homography"))
    }
}
