//! Scene composition: lift each pose on its own, stack the roots at one
//! origin, undo the camera tilt, displace, and scale onto the ground.
//!
//! The three switches of [`AblationMode`] select which of the corrections
//! run, so the same code path produces every ablation row.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    elevation_offset, lift_keypoint, lift_pose, rotate_pose, rotation_about_x_signed,
    CompensationSign, ElevationAngle,
};
use crate::lifter::LiftPrediction;
use crate::pose::{Constants, Pose2D, Pose3D, Scene3D};
use crate::skeleton::Skeleton;

/// Feet closer to the root than this (vertically) cannot be scaled onto the ground.
pub const MIN_FOOT_DROP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblationMode {
    pub elevation_compensation: bool,
    pub rotation_compensation: bool,
    pub contact_heuristic: bool,
}

impl AblationMode {
    pub const NAIVE: Self = Self::new(false, false, false);
    pub const HEURISTIC: Self = Self::new(false, false, true);
    pub const ROTATION_HEURISTIC: Self = Self::new(false, true, true);
    pub const FULL: Self = Self::new(true, true, true);

    pub const fn new(elevation: bool, rotation: bool, heuristic: bool) -> Self {
        Self {
            elevation_compensation: elevation,
            rotation_compensation: rotation,
            contact_heuristic: heuristic,
        }
    }

    /// The four ablation rows, from the plain baseline to the full method.
    pub fn table_rows() -> [Self; 4] {
        [
            Self::NAIVE,
            Self::HEURISTIC,
            Self::ROTATION_HEURISTIC,
            Self::FULL,
        ]
    }

    pub fn name(&self) -> String {
        match *self {
            Self::NAIVE => "naive".into(),
            Self::HEURISTIC => "heuristic".into(),
            Self::ROTATION_HEURISTIC => "rotation-heuristic".into(),
            Self::FULL => "full".into(),
            m => format!(
                "custom-{}{}{}",
                m.elevation_compensation as u8, m.rotation_compensation as u8, m.contact_heuristic as u8
            ),
        }
    }
}

impl Default for AblationMode {
    fn default() -> Self {
        Self::FULL
    }
}

impl fmt::Display for AblationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for AblationMode {
    type Err = Error;

    /// Accepts the four row names or `custom-ERH` with 0/1 digits.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Self::NAIVE),
            "heuristic" => Ok(Self::HEURISTIC),
            "rotation-heuristic" => Ok(Self::ROTATION_HEURISTIC),
            "full" => Ok(Self::FULL),
            other => {
                let bits = other
                    .strip_prefix("custom-")
                    .filter(|b| b.len() == 3 && b.bytes().all(|c| c == b'0' || c == b'1'))
                    .ok_or_else(|| Error::InvalidSpec(format!("unknown mode `{other}`")))?
                    .as_bytes();
                Ok(Self::new(bits[0] == b'1', bits[1] == b'1', bits[2] == b'1'))
            }
        }
    }
}

/// A reconstructed scene plus the exact transforms that produced it.
///
/// Everything is listed in output order: pose 1 is the pose whose pelvis has
/// the smaller pixel `u` (ties: smaller `v`); `order` maps back to input
/// indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub scene: Scene3D,
    pub order: Vec<usize>,
    pub mode: AblationMode,
    pub sign: CompensationSign,
    /// Elevation angles as predicted.
    pub predicted_thetas: Vec<f64>,
    /// Angle passed to the x-axis rotation for each pose (0 when rotation is off).
    pub rotation_angles: Vec<f64>,
    /// Whether the contact heuristic equalized this pose's angle with pose 1.
    pub heuristic_fired: Vec<bool>,
    /// Vertical root offset relative to pose 1 (0 for pose 1).
    pub vertical_offsets: Vec<f64>,
    /// Horizontal root offset relative to pose 1 (0 for pose 1).
    pub horizontal_offsets: Vec<f64>,
    pub root_heights: Vec<f64>,
    pub scale_factors: Vec<f64>,
    pub root_positions: Vec<Vector3<f64>>,
}

impl ReconstructionResult {
    /// Re-applies the recorded transforms to freshly lifted poses (output order).
    pub fn replay(&self, lifted: &[Pose3D], skeleton: &Skeleton) -> Result<Scene3D> {
        if lifted.len() != self.scene.len() {
            return Err(Error::ScenePairMismatch(format!(
                "{} poses to replay, {} recorded",
                lifted.len(),
                self.scene.len()
            )));
        }
        let root = skeleton.root();
        let poses = lifted
            .iter()
            .enumerate()
            .map(|(k, pose)| {
                let r = rotation_about_x_signed(
                    ElevationAngle::new(self.rotation_angles[k])?,
                    self.sign,
                );
                let origin = pose.joint(root);
                let s = self.scale_factors[k];
                let target = self.root_positions[k];
                Ok(Pose3D::new(
                    pose.coords
                        .iter()
                        .map(|p| target + r.apply(&(p - origin)) * s)
                        .collect(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Scene3D::new(poses, root)
    }
}

/// Converts an image displacement to scene units at root depth `c`.
pub fn pixel_displacement_to_scene(delta_px: f64, a: &Pose2D, b: &Pose2D, c: f64) -> f64 {
    let mean_scale = 0.5 * (a.norm_scale() + b.norm_scale());
    delta_px / mean_scale * c
}

/// Scales `pose` about its root so that, with the root placed at height
/// `root_height`, its lowest foot rests on `y = 0`.
///
/// Returns the scaled pose (root moved vertically to `root_height`) and the
/// scale factor `root_height / drop`.
pub fn ground_plane_scale(
    pose: &Pose3D,
    root_height: f64,
    skeleton: &Skeleton,
) -> Result<(Pose3D, f64)> {
    let drop = foot_drop(pose, skeleton);
    if !(root_height.is_finite() && root_height > 0.0) {
        return Err(Error::DegenerateScaling {
            pose: 0,
            reason: format!("root height {root_height} is not above the ground"),
        });
    }
    if !(drop.is_finite() && drop > MIN_FOOT_DROP) {
        return Err(Error::DegenerateScaling {
            pose: 0,
            reason: format!("lowest foot is {drop} below the root"),
        });
    }
    let s = root_height / drop;
    let root = pose.joint(skeleton.root());
    let target = Vector3::new(root.x, root_height, root.z);
    let scaled = pose
        .coords
        .iter()
        .map(|p| target + (p - root) * s)
        .collect();
    Ok((Pose3D::new(scaled), s))
}

/// Vertical distance from the root down to the lowest foot.
fn foot_drop(pose: &Pose3D, skeleton: &Skeleton) -> f64 {
    let root_y = pose.joint(skeleton.root()).y;
    let lowest = skeleton
        .feet()
        .iter()
        .map(|f| pose.joint(*f).y)
        .fold(f64::INFINITY, f64::min);
    root_y - lowest
}

/// Output order: ascending pelvis `u`, ties by `v`, then input index.
pub fn canonical_order(poses: &[Pose2D]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..poses.len()).collect();
    order.sort_by(|&a, &b| compare_root_pixels(&poses[a], &poses[b]).then(a.cmp(&b)));
    order
}

pub fn reconstruct(
    poses: &[Pose2D],
    predictions: &[LiftPrediction],
    skeleton: &Skeleton,
    mode: AblationMode,
    constants: &Constants,
) -> Result<ReconstructionResult> {
    reconstruct_with_sign(
        poses,
        predictions,
        skeleton,
        mode,
        constants,
        CompensationSign::AsPrinted,
    )
}

pub fn reconstruct_with_sign(
    poses: &[Pose2D],
    predictions: &[LiftPrediction],
    skeleton: &Skeleton,
    mode: AblationMode,
    constants: &Constants,
    sign: CompensationSign,
) -> Result<ReconstructionResult> {
    constants.validate()?;
    if poses.len() < 2 {
        return Err(Error::FewerThanTwoPoses(poses.len()));
    }
    if predictions.len() != poses.len() {
        return Err(Error::JointCountMismatch {
            expected: poses.len(),
            actual: predictions.len(),
        });
    }
    for p in poses {
        if p.len() != skeleton.len() {
            return Err(Error::JointCountMismatch {
                expected: skeleton.len(),
                actual: p.len(),
            });
        }
    }
    let c = constants.c;
    let root = skeleton.root();
    let order = canonical_order(poses);
    let poses: Vec<&Pose2D> = order.iter().map(|&i| &poses[i]).collect();
    let preds: Vec<&LiftPrediction> = order.iter().map(|&i| &predictions[i]).collect();
    let n = poses.len();

    // 1-2. independent lifting, roots stacked at the shared origin
    let mut centered = Vec::with_capacity(n);
    for (pose, pred) in poses.iter().zip(&preds) {
        let lifted = lift_pose(pose, pred, c)?;
        let origin = -lifted.joint(root);
        centered.push(lifted.translated(&origin));
    }

    // 3. rotation compensation about each root
    let thetas: Vec<ElevationAngle> = preds.iter().map(|p| p.theta()).collect();
    let rotation_angles: Vec<f64> = thetas
        .iter()
        .map(|t| if mode.rotation_compensation { t.radians() } else { 0.0 })
        .collect();
    let rotated: Vec<Pose3D> = centered
        .iter()
        .zip(&rotation_angles)
        .map(|(pose, &angle)| {
            let r = rotation_about_x_signed(ElevationAngle::new(angle)?, sign);
            Ok(rotate_pose(pose, &r, &Vector3::zeros()))
        })
        .collect::<Result<_>>()?;

    // 4-6. contact heuristic, vertical and horizontal displacement against pose 1
    let first = poses[0];
    let mut heuristic_fired = vec![false; n];
    let mut vertical_offsets = vec![0.0; n];
    let mut horizontal_offsets = vec![0.0; n];
    for k in 1..n {
        let du = poses[k].root_pixel().x - first.root_pixel().x;
        // v grows downward; a positive offset means pose k sits higher
        let dv = first.root_pixel().y - poses[k].root_pixel().y;
        let fired = mode.contact_heuristic && dv.abs() <= constants.contact_threshold_px;
        heuristic_fired[k] = fired;
        vertical_offsets[k] = if mode.elevation_compensation {
            let (t1, tk) = if fired {
                let m = ElevationAngle::mean(thetas[0], thetas[k]);
                (m, m)
            } else {
                (thetas[0], thetas[k])
            };
            elevation_offset(t1, tk, c)
        } else if fired {
            0.0
        } else {
            pixel_displacement_to_scene(dv, first, poses[k], c)
        };
        horizontal_offsets[k] = pixel_displacement_to_scene(du, first, poses[k], c);
    }

    // 7. ground-plane scaling; pose 1 keeps its own proportions
    let first_height = foot_drop(&rotated[0], skeleton);
    let mut root_heights = Vec::with_capacity(n);
    let mut scale_factors = Vec::with_capacity(n);
    let mut root_positions = Vec::with_capacity(n);
    let mut placed = Vec::with_capacity(n);
    for k in 0..n {
        let height = first_height + vertical_offsets[k];
        let (scaled, s) = ground_plane_scale(&rotated[k], height, skeleton).map_err(|e| match e {
            Error::DegenerateScaling { reason, .. } => Error::DegenerateScaling { pose: k, reason },
            other => other,
        })?;
        let shift = Vector3::new(horizontal_offsets[k], 0.0, 0.0);
        let pose = scaled.translated(&shift);
        root_heights.push(height);
        scale_factors.push(s);
        root_positions.push(pose.joint(root));
        placed.push(pose);
    }

    Ok(ReconstructionResult {
        scene: Scene3D::new(placed, root)?,
        order,
        mode,
        sign,
        predicted_thetas: thetas.iter().map(|t| t.radians()).collect(),
        rotation_angles,
        heuristic_fired,
        vertical_offsets,
        horizontal_offsets,
        root_heights,
        scale_factors,
        root_positions,
    })
}

/// Baseline that lifts every pose as one skeleton rooted at the pixel
/// midpoint of all pelvises, with no tilt, elevation, or ground handling.
/// Poses are returned in canonical order.
pub fn reconstruct_joint_lifting(
    poses: &[Pose2D],
    predictions: &[LiftPrediction],
    skeleton: &Skeleton,
    c: f64,
) -> Result<Scene3D> {
    if poses.len() < 2 {
        return Err(Error::FewerThanTwoPoses(poses.len()));
    }
    if predictions.len() != poses.len() {
        return Err(Error::JointCountMismatch {
            expected: poses.len(),
            actual: predictions.len(),
        });
    }
    let n = poses.len() as f64;
    let mid = poses.iter().map(|p| p.root_pixel()).sum::<nalgebra::Vector2<f64>>() / n;
    let scale = poses.iter().map(Pose2D::norm_scale).sum::<f64>() / n;
    let order = canonical_order(poses);
    let lifted = order
        .iter()
        .map(|&i| {
            let (pose, pred) = (&poses[i], &predictions[i]);
            if pred.depth_offsets().len() != pose.len() {
                return Err(Error::JointCountMismatch {
                    expected: pose.len(),
                    actual: pred.depth_offsets().len(),
                });
            }
            let coords = pose
                .pixel_coords()
                .iter()
                .zip(pred.depth_offsets())
                .map(|(px, d)| {
                    let x = (px.x - mid.x) / scale;
                    let y = -(px.y - mid.y) / scale;
                    lift_keypoint(x, y, *d, c)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Pose3D::new(coords))
        })
        .collect::<Result<Vec<_>>>()?;
    Scene3D::new(lifted, skeleton.root())
}

/// Pelvis ordering used for output poses: ascending `u`, then `v`.
pub fn compare_root_pixels(a: &Pose2D, b: &Pose2D) -> Ordering {
    let (pa, pb) = (a.root_pixel(), b.root_pixel());
    pa.x.total_cmp(&pb.x).then(pa.y.total_cmp(&pb.y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector2;

    fn stick_skeleton() -> Skeleton {
        let names = ["pelvis", "l_hip", "r_hip", "head", "l_foot", "r_foot"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        Skeleton::new(names, "pelvis", "head", "l_hip", "r_hip", &["l_foot", "r_foot"]).unwrap()
    }

    fn stick_pose(root_height: f64, foot_drop: f64) -> Pose3D {
        let r = Vector3::new(0.0, root_height, 0.0);
        Pose3D::new(vec![
            r,
            r + Vector3::new(0.1, 0.0, 0.0),
            r + Vector3::new(-0.1, 0.0, 0.0),
            r + Vector3::new(0.0, 1.0, 0.0),
            r + Vector3::new(0.1, -foot_drop, 0.0),
            r + Vector3::new(-0.1, -foot_drop * 0.9, 0.0),
        ])
    }

    /// A front-facing stick figure whose head is exactly 1/c above the root.
    fn stick_2d(root_px: Vector2<f64>, scale: f64) -> Pose2D {
        let norm = vec![
            Vector2::zeros(),
            Vector2::new(0.01, 0.0),
            Vector2::new(-0.01, 0.0),
            Vector2::new(0.0, 0.1),
            Vector2::new(0.01, -0.15),
            Vector2::new(-0.01, -0.15),
        ];
        Pose2D::from_normalized(norm, scale, root_px).unwrap()
    }

    #[test]
    fn mode_names_round_trip() {
        for m in AblationMode::table_rows() {
            assert_eq!(m.name().parse::<AblationMode>().unwrap(), m);
        }
        let custom: AblationMode = "custom-101".parse().unwrap();
        assert_eq!(custom, AblationMode::new(true, false, true));
        assert_eq!(custom.name(), "custom-101");
        assert!("sideways".parse::<AblationMode>().is_err());
        assert!("custom-12".parse::<AblationMode>().is_err());
    }

    #[test]
    fn pixel_displacement_examples() {
        let a = stick_2d(Vector2::new(0.0, 0.0), 1000.0);
        let b = stick_2d(Vector2::new(100.0, 0.0), 1000.0);
        assert_abs_diff_eq!(pixel_displacement_to_scene(100.0, &a, &b, 10.0), 1.0, epsilon = 1e-15);
        assert_eq!(pixel_displacement_to_scene(0.0, &a, &b, 10.0), 0.0);
        let a2 = stick_2d(Vector2::new(0.0, 0.0), 2000.0);
        let b2 = stick_2d(Vector2::new(0.0, 0.0), 2000.0);
        assert_abs_diff_eq!(
            pixel_displacement_to_scene(200.0, &a2, &b2, 10.0),
            pixel_displacement_to_scene(100.0, &a, &b, 10.0),
            epsilon = 1e-15
        );
    }

    #[test]
    fn ground_plane_scale_examples() {
        let s = stick_skeleton();
        let pose = stick_pose(1.0, 0.8);
        let (scaled, factor) = ground_plane_scale(&pose, 1.0, &s).unwrap();
        assert_abs_diff_eq!(factor, 1.25, epsilon = 1e-12);
        assert_abs_diff_eq!(scaled.joint(s.feet()[0]).y, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(scaled.joint(s.root()).y, 1.0, epsilon = 1e-15);

        let exact = stick_pose(1.0, 1.0);
        let (same, one) = ground_plane_scale(&exact, 1.0, &s).unwrap();
        assert_eq!(one, 1.0);
        assert_eq!(same, exact);

        let flat = stick_pose(1.0, 0.0);
        assert!(matches!(
            ground_plane_scale(&flat, 1.0, &s),
            Err(Error::DegenerateScaling { .. })
        ));
        assert!(matches!(
            ground_plane_scale(&pose, 0.0, &s),
            Err(Error::DegenerateScaling { .. })
        ));
    }

    #[test]
    fn symmetric_scene_is_pure_horizontal_offset() {
        let s = stick_skeleton();
        let a = stick_2d(Vector2::new(400.0, 500.0), 1000.0);
        let b = stick_2d(Vector2::new(600.0, 500.0), 1000.0);
        let pred = LiftPrediction::new(vec![0.0; 6], ElevationAngle::zero());
        let res = reconstruct(
            &[b.clone(), a.clone()],
            &[pred.clone(), pred.clone()],
            &s,
            AblationMode::FULL,
            &Constants::default(),
        )
        .unwrap();
        assert_eq!(res.order, vec![1, 0]);
        assert_eq!(res.vertical_offsets[1], 0.0);
        assert_abs_diff_eq!(res.horizontal_offsets[1], 2.0, epsilon = 1e-12);
        assert_eq!(res.scale_factors[0], res.scale_factors[1]);
        let (p0, p1) = (&res.scene.poses()[0], &res.scene.poses()[1]);
        for (a, b) in p0.coords.iter().zip(&p1.coords) {
            assert_abs_diff_eq!(b - a, Vector3::new(2.0, 0.0, 0.0), epsilon = 1e-12);
        }
    }

    #[test]
    fn contact_heuristic_equalizes_angles() {
        let s = stick_skeleton();
        let a = stick_2d(Vector2::new(400.0, 500.0), 1000.0);
        let b = stick_2d(Vector2::new(600.0, 470.0), 1000.0);
        let pa = LiftPrediction::new(vec![0.0; 6], ElevationAngle::new(0.2).unwrap());
        let pb = LiftPrediction::new(vec![0.0; 6], ElevationAngle::new(0.1).unwrap());
        let k = Constants::default();
        let full = reconstruct(&[a.clone(), b.clone()], &[pa.clone(), pb.clone()], &s, AblationMode::FULL, &k)
            .unwrap();
        assert!(full.heuristic_fired[1]);
        assert_eq!(full.vertical_offsets[1], 0.0);
        // rotation still uses each pose's own angle
        assert_eq!(full.rotation_angles, vec![0.2, 0.1]);

        let no_heur = AblationMode::new(true, true, false);
        let res = reconstruct(&[a.clone(), b.clone()], &[pa.clone(), pb.clone()], &s, no_heur, &k).unwrap();
        assert!(!res.heuristic_fired[1]);
        assert_abs_diff_eq!(
            res.vertical_offsets[1],
            10.0 * (0.2f64.tan() - 0.1f64.tan()),
            epsilon = 1e-12
        );

        let naive = reconstruct(&[a.clone(), b.clone()], &[pa.clone(), pb.clone()], &s, AblationMode::NAIVE, &k)
            .unwrap();
        assert_abs_diff_eq!(naive.vertical_offsets[1], 0.3, epsilon = 1e-12);
        assert_eq!(naive.rotation_angles, vec![0.0, 0.0]);
        let heur = reconstruct(&[a, b], &[pa, pb], &s, AblationMode::HEURISTIC, &k).unwrap();
        assert_eq!(heur.vertical_offsets[1], 0.0);
    }

    #[test]
    fn lowest_feet_on_ground_and_replay() {
        let s = stick_skeleton();
        let a = stick_2d(Vector2::new(400.0, 500.0), 1000.0);
        let b = stick_2d(Vector2::new(650.0, 380.0), 900.0);
        let pa = LiftPrediction::new(vec![0.0, 0.1, -0.1, 0.2, 0.3, -0.2], ElevationAngle::new(0.3).unwrap());
        let pb = LiftPrediction::new(vec![0.5, 0.4, 0.6, 0.3, 0.9, 0.2], ElevationAngle::new(0.25).unwrap());
        for mode in AblationMode::table_rows() {
            let res = reconstruct(
                &[a.clone(), b.clone()],
                &[pa.clone(), pb.clone()],
                &s,
                mode,
                &Constants::default(),
            )
            .unwrap();
            for pose in res.scene.poses() {
                let lowest = s.feet().iter().map(|f| pose.joint(*f).y).fold(f64::INFINITY, f64::min);
                assert!(lowest.abs() < 1e-9, "{mode}: lowest foot at {lowest}");
            }
            let lifted = vec![
                lift_pose(&a, &pa, 10.0).unwrap(),
                lift_pose(&b, &pb, 10.0).unwrap(),
            ];
            let replayed = res.replay(&lifted, &s).unwrap();
            for (x, y) in replayed.all_joints().zip(res.scene.all_joints()) {
                assert!((x - y).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn contract_errors() {
        let s = stick_skeleton();
        let a = stick_2d(Vector2::new(400.0, 500.0), 1000.0);
        let pred = LiftPrediction::new(vec![0.0; 6], ElevationAngle::zero());
        let k = Constants::default();
        assert!(matches!(
            reconstruct(std::slice::from_ref(&a), std::slice::from_ref(&pred), &s, AblationMode::FULL, &k),
            Err(Error::FewerThanTwoPoses(1))
        ));
        let short = LiftPrediction::new(vec![0.0; 5], ElevationAngle::zero());
        assert!(matches!(
            reconstruct(&[a.clone(), a.clone()], &[pred.clone(), short], &s, AblationMode::FULL, &k),
            Err(Error::JointCountMismatch { .. })
        ));
        // pose 2 far below pose 1: its root would end up under the ground
        let low = stick_2d(Vector2::new(600.0, 5000.0), 1000.0);
        assert!(matches!(
            reconstruct(&[a, low], &[pred.clone(), pred], &s, AblationMode::NAIVE, &k),
            Err(Error::DegenerateScaling { pose: 1, .. })
        ));
    }

    #[test]
    fn joint_lifting_baseline_runs() {
        let s = stick_skeleton();
        let a = stick_2d(Vector2::new(400.0, 500.0), 1000.0);
        let b = stick_2d(Vector2::new(600.0, 450.0), 800.0);
        let pred = LiftPrediction::new(vec![0.0; 6], ElevationAngle::zero());
        let scene = reconstruct_joint_lifting(&[a, b], &[pred.clone(), pred], &s, 10.0).unwrap();
        assert_eq!(scene.len(), 2);
        // the midpoint root sits between the two pelvises
        let r0 = scene.root_offsets()[0];
        let r1 = scene.root_offsets()[1];
        assert_abs_diff_eq!(r0.x + r1.x, 0.0, epsilon = 1e-12);
    }
}
