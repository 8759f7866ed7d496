//! Closed-form geometry: perspective lifting with a depth floor, the
//! vertical offset implied by two elevation angles, and the x-axis
//! rotation that levels a pose seen from an elevated camera.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lifter::LiftPrediction;
use crate::pose::{Pose2D, Pose3D};

/// Elevation of the camera ray through a pelvis, in radians.
/// Positive means the camera looks down at the subject.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ElevationAngle(f64);

impl ElevationAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if theta.is_finite() && theta.abs() < FRAC_PI_2 {
            Ok(Self(theta))
        } else {
            Err(Error::InvalidAngle(theta))
        }
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn zero() -> Self {
        Self(0.0)
    }

    /// Mean of two valid angles; always valid.
    pub fn mean(a: Self, b: Self) -> Self {
        Self(0.5 * (a.0 + b.0))
    }
}

impl TryFrom<f64> for ElevationAngle {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ElevationAngle> for f64 {
    fn from(a: ElevationAngle) -> f64 {
        a.0
    }
}

/// A proper 3x3 rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix3(Matrix3<f64>);

impl RotationMatrix3 {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Accepts `m` if it is orthogonal with determinant +1 within `tol`.
    pub fn from_matrix(m: Matrix3<f64>, tol: f64) -> Result<Self> {
        let ortho = (m.transpose() * m - Matrix3::identity()).abs().max();
        let det = m.determinant();
        if ortho <= tol && (det - 1.0).abs() <= tol {
            Ok(Self(m))
        } else {
            Err(Error::DegenerateConfiguration(format!(
                "not a rotation: orthogonality error {ortho:e}, det {det}"
            )))
        }
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }
}

impl std::ops::Mul for RotationMatrix3 {
    type Output = RotationMatrix3;

    fn mul(self, rhs: Self) -> Self {
        Self(self.0 * rhs.0)
    }
}

/// Which sign of the x-axis rotation is used for compensation.
///
/// `AsPrinted` is `[[1,0,0],[0,cos,-sin],[0,sin,cos]]`; `Opposite` swaps the
/// signs of the sine terms. Only `AsPrinted` levels poses produced by a
/// camera whose positive elevation looks down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompensationSign {
    #[default]
    AsPrinted,
    Opposite,
}

/// Lifts one normalized keypoint: `Z = max(1, d_hat + c)`, `X = x Z`, `Y = y Z`.
pub fn lift_keypoint(x: f64, y: f64, d_hat: f64, c: f64) -> Result<Vector3<f64>> {
    if !(x.is_finite() && y.is_finite() && d_hat.is_finite() && c.is_finite()) {
        return Err(Error::NonFiniteInput(format!(
            "lift_keypoint({x}, {y}, {d_hat}, {c})"
        )));
    }
    let z = (d_hat + c).max(1.0);
    Ok(Vector3::new(x * z, y * z, z))
}

/// Lifts every joint of `pose` independently of any other pose.
pub fn lift_pose(pose: &Pose2D, prediction: &LiftPrediction, c: f64) -> Result<Pose3D> {
    let offsets = prediction.depth_offsets();
    if offsets.len() != pose.len() {
        return Err(Error::JointCountMismatch {
            expected: pose.len(),
            actual: offsets.len(),
        });
    }
    let coords = pose
        .norm_coords()
        .iter()
        .zip(offsets)
        .map(|(n, d)| lift_keypoint(n.x, n.y, *d, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(Pose3D::new(coords))
}

/// `c * (tan(theta1) - tan(theta2))`: how far the root of pose 2 sits above
/// the root of pose 1 when both roots are `c` away horizontally.
pub fn elevation_offset(theta1: ElevationAngle, theta2: ElevationAngle, c: f64) -> f64 {
    c * (theta1.0.tan() - theta2.0.tan())
}

pub fn rotation_about_x(theta: ElevationAngle) -> RotationMatrix3 {
    rotation_about_x_signed(theta, CompensationSign::AsPrinted)
}

pub fn rotation_about_x_signed(theta: ElevationAngle, sign: CompensationSign) -> RotationMatrix3 {
    let t = match sign {
        CompensationSign::AsPrinted => theta.0,
        CompensationSign::Opposite => -theta.0,
    };
    let (s, c) = t.sin_cos();
    RotationMatrix3(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
}

/// Maps each joint `p` to `R (p - center) + center`.
pub fn rotate_pose(pose: &Pose3D, rotation: &RotationMatrix3, center: &Vector3<f64>) -> Pose3D {
    Pose3D::new(
        pose.coords
            .iter()
            .map(|p| rotation.apply(&(p - center)) + center)
            .collect(),
    )
}

/// Perspective projection `(X/Z, Y/Z)`; the inverse of [`lift_keypoint`]
/// away from the depth floor.
pub fn project_keypoint(p: &Vector3<f64>) -> Result<(f64, f64)> {
    if p.z.is_nan() || p.z < 1.0 {
        return Err(Error::DepthTooSmall(p.z));
    }
    Ok((p.x / p.z, p.y / p.z))
}
