//! Pose containers and the 2D normalization protocol.
//!
//! Image pixels have `v` growing downward; normalized coordinates have `y`
//! growing upward, so `y = -(v - v_root) / norm_scale`. After
//! normalization the root sits at the origin and the head is exactly `1/c`
//! away from it.

use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::skeleton::{KeypointId, Skeleton};

/// Head-to-root pixel distances below this are treated as degenerate.
pub const MIN_HEAD_ROOT_PX: f64 = 1e-6;
/// A supplied root must agree with the hip midpoint to within this many pixels.
pub const ROOT_TOLERANCE_PX: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    /// Camera-to-root distance every pose is lifted at.
    pub c: f64,
    /// Vertical pelvis gap (pixels) at or below which both elevation
    /// angles are taken to be equal.
    pub contact_threshold_px: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c: 10.0,
            contact_threshold_px: 50.0,
        }
    }
}

impl Constants {
    pub fn new(c: f64, contact_threshold_px: f64) -> Result<Self> {
        let k = Self {
            c,
            contact_threshold_px,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.c.is_finite() || self.c <= 1.0 {
            return Err(Error::InvalidSpec(format!("c must be > 1, got {}", self.c)));
        }
        if !self.contact_threshold_px.is_finite() || self.contact_threshold_px < 0.0 {
            return Err(Error::InvalidSpec(format!(
                "contact threshold must be >= 0, got {}",
                self.contact_threshold_px
            )));
        }
        Ok(())
    }
}

/// A 2D pose in both pixel and root-centred normalized form.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose2D {
    pixel: Vec<Vector2<f64>>,
    norm: Vec<Vector2<f64>>,
    norm_scale: f64,
    root_pixel: Vector2<f64>,
}

impl Pose2D {
    /// Builds a pose from normalized coordinates, deriving pixels from them.
    pub fn from_normalized(
        norm: Vec<Vector2<f64>>,
        norm_scale: f64,
        root_pixel: Vector2<f64>,
    ) -> Result<Self> {
        if !(norm_scale.is_finite() && norm_scale > 0.0) {
            return Err(Error::DegeneratePose(format!(
                "norm_scale must be positive, got {norm_scale}"
            )));
        }
        let pixel = norm
            .iter()
            .map(|n| to_pixel(n, norm_scale, &root_pixel))
            .collect();
        Ok(Self {
            pixel,
            norm,
            norm_scale,
            root_pixel,
        })
    }

    pub fn pixel_coords(&self) -> &[Vector2<f64>] {
        &self.pixel
    }

    pub fn norm_coords(&self) -> &[Vector2<f64>] {
        &self.norm
    }

    /// Pixels per normalized unit.
    pub fn norm_scale(&self) -> f64 {
        self.norm_scale
    }

    pub fn root_pixel(&self) -> Vector2<f64> {
        self.root_pixel
    }

    pub fn len(&self) -> usize {
        self.norm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norm.is_empty()
    }
}

fn to_pixel(norm: &Vector2<f64>, scale: f64, root: &Vector2<f64>) -> Vector2<f64> {
    Vector2::new(root.x + norm.x * scale, root.y - norm.y * scale)
}

/// Normalizes raw pixel keypoints given in skeleton order.
///
/// `None` entries are missing detections. The root may be omitted, in which
/// case it is placed at the hip midpoint; if supplied it must sit there.
pub fn normalize_pose(
    raw: &[Option<Vector2<f64>>],
    skeleton: &Skeleton,
    c: f64,
) -> Result<Pose2D> {
    if raw.len() != skeleton.len() {
        return Err(Error::JointCountMismatch {
            expected: skeleton.len(),
            actual: raw.len(),
        });
    }
    if !c.is_finite() || c <= 1.0 {
        return Err(Error::InvalidSpec(format!("c must be > 1, got {c}")));
    }
    let get = |id: KeypointId| -> Result<Vector2<f64>> {
        raw[id.0].ok_or_else(|| Error::MissingJoint(skeleton.name(id).to_string()))
    };
    for p in raw.iter().flatten() {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(Error::NonFiniteInput("pixel coordinate".into()));
        }
    }
    let left = get(skeleton.left_hip())?;
    let right = get(skeleton.right_hip())?;
    let root_pixel = (left + right) * 0.5;

    let mut pixel = Vec::with_capacity(raw.len());
    for (i, p) in raw.iter().enumerate() {
        let id = KeypointId(i);
        if id == skeleton.root() {
            if let Some(p) = p {
                let distance_px = (p - root_pixel).norm();
                if distance_px > ROOT_TOLERANCE_PX {
                    return Err(Error::RootMismatch {
                        name: skeleton.name(id).to_string(),
                        distance_px,
                    });
                }
            }
            pixel.push(root_pixel);
        } else {
            pixel.push(get(id)?);
        }
    }

    let head_root_px = (pixel[skeleton.head().0] - root_pixel).norm();
    if head_root_px < MIN_HEAD_ROOT_PX {
        return Err(Error::DegeneratePose(format!(
            "head is {head_root_px} px from the root"
        )));
    }
    let norm_scale = head_root_px * c;
    let norm = pixel
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if i == skeleton.root().0 {
                Vector2::zeros()
            } else {
                Vector2::new((p.x - root_pixel.x) / norm_scale, -(p.y - root_pixel.y) / norm_scale)
            }
        })
        .collect();
    Ok(Pose2D {
        pixel,
        norm,
        norm_scale,
        root_pixel,
    })
}

/// Maps normalized coordinates back to pixels.
pub fn denormalize(pose: &Pose2D) -> Vec<Vector2<f64>> {
    pose.norm
        .iter()
        .map(|n| to_pixel(n, pose.norm_scale, &pose.root_pixel))
        .collect()
}

/// Per-joint 3D coordinates in scene units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pose3D {
    pub coords: Vec<Vector3<f64>>,
}

impl Pose3D {
    pub fn new(coords: Vec<Vector3<f64>>) -> Self {
        Self { coords }
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn joint(&self, id: KeypointId) -> Vector3<f64> {
        self.coords[id.0]
    }

    pub fn translated(&self, by: &Vector3<f64>) -> Self {
        Self::new(self.coords.iter().map(|p| p + by).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|p| p.iter().all(|v| v.is_finite()))
    }
}

/// Several poses in one shared frame: y up, ground plane at y = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene3D {
    poses: Vec<Pose3D>,
    root_offsets: Vec<Vector3<f64>>,
    root: KeypointId,
}

impl Scene3D {
    /// `root_offsets` are read off the root joint of each pose.
    pub fn new(poses: Vec<Pose3D>, root: KeypointId) -> Result<Self> {
        let joints = poses.first().map(Pose3D::len).unwrap_or(0);
        for p in &poses {
            if p.len() != joints {
                return Err(Error::JointCountMismatch {
                    expected: joints,
                    actual: p.len(),
                });
            }
        }
        if root.0 >= joints && !poses.is_empty() {
            return Err(Error::InvalidSkeleton(format!(
                "root index {} out of range for {joints} joints",
                root.0
            )));
        }
        let root_offsets = poses.iter().map(|p| p.joint(root)).collect();
        Ok(Self {
            poses,
            root_offsets,
            root,
        })
    }

    pub fn poses(&self) -> &[Pose3D] {
        &self.poses
    }

    pub fn root_offsets(&self) -> &[Vector3<f64>] {
        &self.root_offsets
    }

    pub fn root(&self) -> KeypointId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn joints_per_pose(&self) -> usize {
        self.poses.first().map(Pose3D::len).unwrap_or(0)
    }

    /// Every joint of every pose, pose-major.
    pub fn all_joints(&self) -> impl Iterator<Item = &Vector3<f64>> {
        self.poses.iter().flat_map(|p| p.coords.iter())
    }

    /// Applies `f` to every joint.
    pub fn map_joints(&self, f: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> Self {
        let poses = self
            .poses
            .iter()
            .map(|p| Pose3D::new(p.coords.iter().map(&f).collect()))
            .collect();
        Self::new(poses, self.root).expect("shape preserved")
    }

    /// The same poses in a different order.
    pub fn reordered(&self, order: &[usize]) -> Self {
        let poses = order.iter().map(|&i| self.poses[i].clone()).collect();
        Self::new(poses, self.root).expect("shape preserved")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn raw_from(skeleton: &Skeleton, joints: &[(&str, f64, f64)]) -> Vec<Option<Vector2<f64>>> {
        let mut raw = vec![None; skeleton.len()];
        for (name, u, v) in joints {
            raw[skeleton.index_of(name).unwrap().0] = Some(Vector2::new(*u, *v));
        }
        raw
    }

    fn small_skeleton() -> Skeleton {
        let names = ["pelvis", "l_hip", "r_hip", "head", "l_foot", "r_foot"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Skeleton::new(names, "pelvis", "head", "l_hip", "r_hip", &["l_foot", "r_foot"]).unwrap()
    }

    #[test]
    fn head_100px_above_pelvis() {
        let s = small_skeleton();
        let raw = raw_from(
            &s,
            &[
                ("l_hip", 520.0, 400.0),
                ("r_hip", 480.0, 400.0),
                ("head", 500.0, 300.0),
                ("l_foot", 520.0, 600.0),
                ("r_foot", 480.0, 600.0),
            ],
        );
        let p = normalize_pose(&raw, &s, 10.0).unwrap();
        assert_abs_diff_eq!(p.norm_scale(), 1000.0, epsilon = 1e-12);
        assert_eq!(p.root_pixel(), Vector2::new(500.0, 400.0));
        let head = p.norm_coords()[s.head().0];
        // v grows down, y grows up
        assert_abs_diff_eq!(head.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(head.y, 0.1, epsilon = 1e-15);
        assert_eq!(p.norm_coords()[s.root().0], Vector2::zeros());
        assert_eq!(p.pixel_coords()[s.root().0], Vector2::new(500.0, 400.0));
    }

    #[test]
    fn already_normalized_pose_is_kept() {
        let s = small_skeleton();
        let raw = raw_from(
            &s,
            &[
                ("pelvis", 0.0, 0.0),
                ("l_hip", 0.02, 0.0),
                ("r_hip", -0.02, 0.0),
                ("head", 0.0, -0.1),
                ("l_foot", 0.02, 0.2),
                ("r_foot", -0.02, 0.2),
            ],
        );
        let p = normalize_pose(&raw, &s, 10.0).unwrap();
        assert_abs_diff_eq!(p.norm_scale(), 1.0, epsilon = 1e-15);
        for (n, px) in p.norm_coords().iter().zip(p.pixel_coords()) {
            assert_abs_diff_eq!(n.x, px.x, epsilon = 1e-15);
            assert_abs_diff_eq!(n.y, -px.y, epsilon = 1e-15);
        }
    }

    #[test]
    fn head_on_pelvis_is_degenerate() {
        let s = small_skeleton();
        let raw = raw_from(
            &s,
            &[
                ("l_hip", 510.0, 400.0),
                ("r_hip", 490.0, 400.0),
                ("head", 500.0, 400.0),
                ("l_foot", 510.0, 500.0),
                ("r_foot", 490.0, 500.0),
            ],
        );
        assert!(matches!(
            normalize_pose(&raw, &s, 10.0),
            Err(Error::DegeneratePose(_))
        ));
    }

    #[test]
    fn missing_and_mismatched_joints() {
        let s = small_skeleton();
        let raw = raw_from(&s, &[("l_hip", 510.0, 400.0), ("head", 500.0, 300.0)]);
        match normalize_pose(&raw, &s, 10.0) {
            Err(Error::MissingJoint(name)) => assert_eq!(name, "r_hip"),
            other => panic!("unexpected {other:?}"),
        }
        let raw = raw_from(
            &s,
            &[
                ("pelvis", 505.0, 400.0),
                ("l_hip", 510.0, 400.0),
                ("r_hip", 490.0, 400.0),
                ("head", 500.0, 300.0),
                ("l_foot", 510.0, 500.0),
                ("r_foot", 490.0, 500.0),
            ],
        );
        assert!(matches!(
            normalize_pose(&raw, &s, 10.0),
            Err(Error::RootMismatch { .. })
        ));
        assert!(matches!(
            normalize_pose(&raw[..3], &s, 10.0),
            Err(Error::JointCountMismatch { .. })
        ));
    }

    #[test]
    fn denormalize_inverse_example() {
        let norm = vec![Vector2::zeros(), Vector2::new(0.0, 0.1)];
        let p = Pose2D::from_normalized(norm, 1000.0, Vector2::new(500.0, 400.0)).unwrap();
        let px = denormalize(&p);
        assert_eq!(px[0], Vector2::new(500.0, 400.0));
        assert_abs_diff_eq!(px[1].x, 500.0, epsilon = 1e-12);
        assert_abs_diff_eq!(px[1].y, 300.0, epsilon = 1e-12);
    }

    #[test]
    fn constants_validation() {
        assert!(Constants::new(10.0, 50.0).is_ok());
        assert!(Constants::new(1.0, 50.0).is_err());
        assert!(Constants::new(10.0, -1.0).is_err());
    }

    #[test]
    fn scene_root_offsets_follow_root_joint() {
        let a = Pose3D::new(vec![Vector3::new(1.0, 2.0, 3.0), Vector3::zeros()]);
        let b = Pose3D::new(vec![Vector3::new(4.0, 5.0, 6.0), Vector3::zeros()]);
        let scene = Scene3D::new(vec![a, b], KeypointId(0)).unwrap();
        assert_eq!(scene.root_offsets()[1], Vector3::new(4.0, 5.0, 6.0));
        let short = Pose3D::new(vec![Vector3::zeros()]);
        assert!(Scene3D::new(vec![scene.poses()[0].clone(), short], KeypointId(0)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn normalization_invariants(
                pts in prop::collection::vec((0.0f64..1920.0, 0.0f64..1080.0), 6),
                c in 2.0f64..20.0,
            ) {
                let s = small_skeleton();
                let mut raw: Vec<Option<Vector2<f64>>> =
                    pts.iter().map(|(u, v)| Some(Vector2::new(*u, *v))).collect();
                raw[s.root().0] = None;
                let mid = (raw[s.left_hip().0].unwrap() + raw[s.right_hip().0].unwrap()) * 0.5;
                prop_assume!((raw[s.head().0].unwrap() - mid).norm() > 1.0);
                let p = normalize_pose(&raw, &s, c).unwrap();
                let head = p.norm_coords()[s.head().0];
                prop_assert!((head.norm() - 1.0 / c).abs() < 1e-9);
                prop_assert!(p.norm_scale() > 0.0);
                for (a, b) in denormalize(&p).iter().zip(p.pixel_coords()) {
                    prop_assert!((a - b).norm() < 1e-9);
                }
                for (i, r) in raw.iter().enumerate() {
                    if let Some(r) = r {
                        prop_assert!((p.pixel_coords()[i] - r).norm() < 1e-9);
                    }
                }
            }
        }
    }
}
