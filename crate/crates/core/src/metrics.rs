//! Rigid-scene Procrustes alignment and scene-level error metrics.
//!
//! The whole predicted scene is aligned to ground truth with one similarity
//! transform, so the relative placement of the people is never corrected
//! per pose. Metric functions work in scene units; [`evaluate_frame`]
//! converts to millimetres.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::composer::AblationMode;
use crate::error::{Error, Result};
use crate::geometry::RotationMatrix3;
use crate::pose::Scene3D;

/// Predicted scenes whose joint spread is below this are degenerate.
pub const MIN_SPREAD: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub rotation: RotationMatrix3,
    pub translation: Vector3<f64>,
}

impl SimilarityTransform {
    pub fn identity() -> Self {
        Self {
            scale: 1.0,
            rotation: RotationMatrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.apply(p) * self.scale + self.translation
    }

    pub fn apply_scene(&self, scene: &Scene3D) -> Scene3D {
        scene.map_joints(|p| self.apply(p))
    }
}

fn check_pair(predicted: &Scene3D, gt: &Scene3D) -> Result<()> {
    if predicted.len() != gt.len() {
        return Err(Error::ScenePairMismatch(format!(
            "{} predicted poses vs {} ground-truth poses",
            predicted.len(),
            gt.len()
        )));
    }
    if predicted.joints_per_pose() != gt.joints_per_pose() {
        return Err(Error::JointCountMismatch {
            expected: gt.joints_per_pose(),
            actual: predicted.joints_per_pose(),
        });
    }
    if predicted.root() != gt.root() {
        return Err(Error::ScenePairMismatch("scenes use different root joints".into()));
    }
    if predicted.is_empty() {
        return Err(Error::ScenePairMismatch("empty scenes".into()));
    }
    Ok(())
}

/// Least-squares similarity transform taking every predicted joint onto its
/// ground-truth counterpart, computed once for the whole scene.
pub fn align_scene(predicted: &Scene3D, gt: &Scene3D) -> Result<(SimilarityTransform, Scene3D)> {
    check_pair(predicted, gt)?;
    let n = (predicted.len() * predicted.joints_per_pose()) as f64;
    let mu_p = predicted.all_joints().sum::<Vector3<f64>>() / n;
    let mu_g = gt.all_joints().sum::<Vector3<f64>>() / n;

    let mut cov = Matrix3::zeros();
    let mut spread = 0.0;
    for (p, g) in predicted.all_joints().zip(gt.all_joints()) {
        let dp = p - mu_p;
        let dg = g - mu_g;
        cov += dg * dp.transpose();
        spread += dp.norm_squared();
    }
    cov /= n;
    spread /= n;
    if spread.is_nan() || spread <= MIN_SPREAD {
        return Err(Error::DegenerateConfiguration(
            "all predicted joints coincide".into(),
        ));
    }

    let svd = cov.svd(true, true);
    let u = svd.u.ok_or_else(|| Error::DegenerateConfiguration("svd failed".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::DegenerateConfiguration("svd failed".into()))?;
    let mut d = Vector3::new(1.0, 1.0, 1.0);
    if (u * v_t).determinant() < 0.0 {
        d.z = -1.0;
    }
    let rotation = u * Matrix3::from_diagonal(&d) * v_t;
    let scale = svd.singular_values.component_mul(&d).sum() / spread;
    let translation = mu_g - rotation * mu_p * scale;

    let transform = SimilarityTransform {
        scale,
        rotation: RotationMatrix3::from_matrix_unchecked(rotation),
        translation,
    };
    let aligned = transform.apply_scene(predicted);
    Ok((transform, aligned))
}

/// Mean Euclidean joint distance pooled over every pose, without alignment.
pub fn mpjpe(predicted: &Scene3D, gt: &Scene3D) -> Result<f64> {
    check_pair(predicted, gt)?;
    let n = (predicted.len() * predicted.joints_per_pose()) as f64;
    Ok(predicted
        .all_joints()
        .zip(gt.all_joints())
        .map(|(p, g)| (p - g).norm())
        .sum::<f64>()
        / n)
}

/// Pooled per-joint error after rigid-scene alignment, in scene units.
pub fn pa_mpjpe(predicted: &Scene3D, gt: &Scene3D) -> Result<f64> {
    let (_, aligned) = align_scene(predicted, gt)?;
    mpjpe(&aligned, gt)
}

/// Size disagreement between corresponding poses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleError {
    /// Mean over poses of `|pred| - |gt|`.
    pub signed: f64,
    /// Mean over poses of `(|pred| - |gt|) / |gt| * 100`.
    pub signed_percent: f64,
    pub abs: f64,
    pub abs_percent: f64,
}

fn centered_norm(pose: &crate::pose::Pose3D, root: crate::skeleton::KeypointId) -> f64 {
    let r = pose.joint(root);
    pose.coords
        .iter()
        .map(|p| (p - r).norm_squared())
        .sum::<f64>()
        .sqrt()
}

/// Compares the Frobenius norm of each root-centred pose. Expects aligned scenes.
pub fn scale_error(predicted: &Scene3D, gt: &Scene3D) -> Result<ScaleError> {
    check_pair(predicted, gt)?;
    let root = gt.root();
    let n = gt.len() as f64;
    let mut out = ScaleError {
        signed: 0.0,
        signed_percent: 0.0,
        abs: 0.0,
        abs_percent: 0.0,
    };
    for (k, (p, g)) in predicted.poses().iter().zip(gt.poses()).enumerate() {
        let gn = centered_norm(g, root);
        if gn < 1e-9 {
            return Err(Error::ZeroNormPose(k));
        }
        let diff = centered_norm(p, root) - gn;
        out.signed += diff;
        out.signed_percent += diff / gn * 100.0;
        out.abs += diff.abs();
        out.abs_percent += diff.abs() / gn * 100.0;
    }
    out.signed /= n;
    out.signed_percent /= n;
    out.abs /= n;
    out.abs_percent /= n;
    Ok(out)
}

/// L2 norm of the elementwise mean absolute root translation error.
/// Expects aligned scenes.
pub fn translation_error(predicted: &Scene3D, gt: &Scene3D) -> Result<f64> {
    check_pair(predicted, gt)?;
    let n = gt.len() as f64;
    let mean_abs = predicted
        .root_offsets()
        .iter()
        .zip(gt.root_offsets())
        .map(|(p, g)| (p - g).abs())
        .sum::<Vector3<f64>>()
        / n;
    Ok(mean_abs.norm())
}

/// How root displacements are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RdeVariant {
    /// Norm of the difference of displacement vectors.
    #[default]
    Vector,
    /// Difference of displacement magnitudes.
    Magnitude,
}

/// Error in the pelvis-to-pelvis displacement of every pose relative to
/// pose 1, averaged over poses 2..n. Expects aligned scenes.
pub fn root_displacement_error(
    predicted: &Scene3D,
    gt: &Scene3D,
    variant: RdeVariant,
) -> Result<f64> {
    check_pair(predicted, gt)?;
    if gt.len() < 2 {
        return Err(Error::FewerThanTwoPoses(gt.len()));
    }
    let (pr, gr) = (predicted.root_offsets(), gt.root_offsets());
    let total: f64 = (1..gt.len())
        .map(|k| {
            let dp = pr[k] - pr[0];
            let dg = gr[k] - gr[0];
            match variant {
                RdeVariant::Vector => (dp - dg).norm(),
                RdeVariant::Magnitude => (dp.norm() - dg.norm()).abs(),
            }
        })
        .sum();
    Ok(total / (gt.len() - 1) as f64)
}

/// Metrics for one frame, in millimetres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameMetrics {
    pub frame_id: u64,
    pub mm_per_unit: f64,
    pub pa_mpjpe_mm: f64,
    pub se_percent: f64,
    pub se_abs_percent: f64,
    pub se_mm: f64,
    pub se_abs_mm: f64,
    pub te_mm: f64,
    pub rde_mm: f64,
}

/// Aligns `predicted` to `gt` once, then computes every metric on the
/// aligned scene.
pub fn evaluate_frame(
    frame_id: u64,
    predicted: &Scene3D,
    gt: &Scene3D,
    mm_per_unit: f64,
    variant: RdeVariant,
) -> Result<FrameMetrics> {
    if !(mm_per_unit.is_finite() && mm_per_unit > 0.0) {
        return Err(Error::InvalidSpec(format!("mm_per_unit must be > 0, got {mm_per_unit}")));
    }
    let (_, aligned) = align_scene(predicted, gt)?;
    let se = scale_error(&aligned, gt)?;
    Ok(FrameMetrics {
        frame_id,
        mm_per_unit,
        pa_mpjpe_mm: mpjpe(&aligned, gt)? * mm_per_unit,
        se_percent: se.signed_percent,
        se_abs_percent: se.abs_percent,
        se_mm: se.signed * mm_per_unit,
        se_abs_mm: se.abs * mm_per_unit,
        te_mm: translation_error(&aligned, gt)? * mm_per_unit,
        rde_mm: root_displacement_error(&aligned, gt, variant)? * mm_per_unit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateMetrics {
    pub frames: usize,
    pub pa_mpjpe_mm: f64,
    pub se_percent: f64,
    pub se_abs_percent: f64,
    pub se_mm: f64,
    pub se_abs_mm: f64,
    pub te_mm: f64,
    pub rde_mm: f64,
}

impl AggregateMetrics {
    /// Arithmetic mean over frames, summed in the given order.
    pub fn from_frames(frames: &[FrameMetrics]) -> Self {
        let n = frames.len().max(1) as f64;
        let mean = |f: fn(&FrameMetrics) -> f64| frames.iter().map(f).sum::<f64>() / n;
        Self {
            frames: frames.len(),
            pa_mpjpe_mm: mean(|m| m.pa_mpjpe_mm),
            se_percent: mean(|m| m.se_percent),
            se_abs_percent: mean(|m| m.se_abs_percent),
            se_mm: mean(|m| m.se_mm),
            se_abs_mm: mean(|m| m.se_abs_mm),
            te_mm: mean(|m| m.te_mm),
            rde_mm: mean(|m| m.rde_mm),
        }
    }
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Per-frame and aggregate metrics for one reconstruction run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub version: u32,
    pub mode: AblationMode,
    pub rde_variant: RdeVariant,
    pub aggregate: AggregateMetrics,
    pub frames: Vec<FrameMetrics>,
    /// Frames the reconstruction could not produce; excluded from `aggregate`.
    #[serde(default)]
    pub failed_frames: Vec<FrameFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameFailure {
    pub frame_id: u64,
    pub error: String,
}

pub const REPORT_CSV_COLUMNS: [&str; 12] = [
    "frame_id",
    "elevation_compensation",
    "rotation_compensation",
    "contact_heuristic",
    "pa_mpjpe_mm",
    "se_percent",
    "se_abs_percent",
    "se_mm",
    "se_abs_mm",
    "te_mm",
    "rde_mm",
    "mm_per_unit",
];

impl MetricReport {
    pub fn new(mode: AblationMode, rde_variant: RdeVariant, mut frames: Vec<FrameMetrics>) -> Self {
        frames.sort_by_key(|f| f.frame_id);
        Self {
            version: REPORT_SCHEMA_VERSION,
            mode,
            rde_variant,
            aggregate: AggregateMetrics::from_frames(&frames),
            frames,
            failed_frames: Vec::new(),
        }
    }

    pub fn with_failures(mut self, mut failures: Vec<FrameFailure>) -> Self {
        failures.sort_by_key(|f| f.frame_id);
        self.failed_frames = failures;
        self
    }

    /// Recomputes the aggregate over the listed frames only.
    pub fn aggregate_over(&self, frame_ids: &[u64]) -> AggregateMetrics {
        let keep: Vec<FrameMetrics> = self
            .frames
            .iter()
            .filter(|f| frame_ids.binary_search(&f.frame_id).is_ok())
            .cloned()
            .collect();
        AggregateMetrics::from_frames(&keep)
    }

    /// One row per frame followed by an `aggregate` row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(REPORT_CSV_COLUMNS).expect("in-memory write");
        let flags = [
            self.mode.elevation_compensation,
            self.mode.rotation_compensation,
            self.mode.contact_heuristic,
        ]
        .map(|b| (b as u8).to_string());
        for f in &self.frames {
            let mut row = vec![f.frame_id.to_string()];
            row.extend(flags.iter().cloned());
            row.extend(
                [
                    f.pa_mpjpe_mm,
                    f.se_percent,
                    f.se_abs_percent,
                    f.se_mm,
                    f.se_abs_mm,
                    f.te_mm,
                    f.rde_mm,
                    f.mm_per_unit,
                ]
                .map(|v| v.to_string()),
            );
            w.write_record(&row).expect("in-memory write");
        }
        let a = &self.aggregate;
        let mut row = vec!["aggregate".to_string()];
        row.extend(flags.iter().cloned());
        row.extend(
            [
                a.pa_mpjpe_mm,
                a.se_percent,
                a.se_abs_percent,
                a.se_mm,
                a.se_abs_mm,
                a.te_mm,
                a.rde_mm,
            ]
            .map(|v| v.to_string()),
        );
        row.push(String::new());
        w.write_record(&row).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{rotation_about_x, ElevationAngle};
    use crate::pose::Pose3D;
    use crate::skeleton::KeypointId;
    use approx::assert_abs_diff_eq;
    use nalgebra::Rotation3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_scene(rng: &mut ChaCha8Rng, poses: usize, joints: usize) -> Scene3D {
        let poses = (0..poses)
            .map(|k| {
                Pose3D::new(
                    (0..joints)
                        .map(|_| {
                            Vector3::new(
                                rng.random_range(-1.0..1.0) + 2.0 * k as f64,
                                rng.random_range(0.0..2.0),
                                rng.random_range(-1.0..1.0),
                            )
                        })
                        .collect(),
                )
            })
            .collect();
        Scene3D::new(poses, KeypointId(0)).unwrap()
    }

    fn two_pose_scene(a: &[[f64; 3]], b: &[[f64; 3]]) -> Scene3D {
        let p = |v: &[[f64; 3]]| Pose3D::new(v.iter().map(|x| Vector3::from(*x)).collect());
        Scene3D::new(vec![p(a), p(b)], KeypointId(0)).unwrap()
    }

    #[test]
    fn identity_alignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_scene(&mut rng, 2, 6);
        let (t, aligned) = align_scene(&s, &s).unwrap();
        assert_abs_diff_eq!(t.scale, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(*t.rotation.matrix(), Matrix3::identity(), epsilon = 1e-12);
        assert!(mpjpe(&aligned, &s).unwrap() < 1e-12);
        assert!(pa_mpjpe(&s, &s).unwrap() < 1e-12);
    }

    #[test]
    fn recovers_scale_and_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gt = random_scene(&mut rng, 2, 8);
        let pred = gt.map_joints(|p| p * 2.0 + Vector3::new(1.0, 0.0, 0.0));
        let (t, aligned) = align_scene(&pred, &gt).unwrap();
        assert_abs_diff_eq!(t.scale, 0.5, epsilon = 1e-12);
        assert!(mpjpe(&aligned, &gt).unwrap() < 1e-9);
    }

    #[test]
    fn degenerate_prediction() {
        let gt = two_pose_scene(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]], &[[2.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let pred = gt.map_joints(|_| Vector3::new(1.0, 1.0, 1.0));
        assert!(matches!(
            align_scene(&pred, &gt),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn mismatched_scenes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_scene(&mut rng, 2, 5);
        let b = random_scene(&mut rng, 3, 5);
        let c = random_scene(&mut rng, 2, 4);
        assert!(matches!(align_scene(&a, &b), Err(Error::ScenePairMismatch(_))));
        assert!(matches!(align_scene(&a, &c), Err(Error::JointCountMismatch { .. })));
    }

    #[test]
    fn alignment_is_rigid_for_whole_scene() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let gt = random_scene(&mut rng, 2, 7);
        let pred = random_scene(&mut rng, 2, 7);
        let (t, aligned) = align_scene(&pred, &gt).unwrap();
        let before: Vec<&Vector3<f64>> = pred.all_joints().collect();
        let after: Vec<&Vector3<f64>> = aligned.all_joints().collect();
        for i in 0..before.len() {
            for j in 0..before.len() {
                let d0 = (before[i] - before[j]).norm() * t.scale;
                let d1 = (after[i] - after[j]).norm();
                assert_abs_diff_eq!(d0, d1, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn translation_error_3_4_5() {
        let gt = two_pose_scene(&[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[2.0, 0.0, 0.0], [2.0, 1.0, 0.0]]);
        let pred = gt.map_joints(|p| p + Vector3::new(3.0, 0.0, 4.0));
        assert_abs_diff_eq!(translation_error(&pred, &gt).unwrap(), 5.0, epsilon = 1e-12);
        assert_eq!(translation_error(&gt, &gt).unwrap(), 0.0);
        let swapped_pred = pred.reordered(&[1, 0]);
        let swapped_gt = gt.reordered(&[1, 0]);
        assert_eq!(
            translation_error(&pred, &gt).unwrap(),
            translation_error(&swapped_pred, &swapped_gt).unwrap()
        );
    }

    #[test]
    fn rde_50mm_example() {
        let gt = two_pose_scene(&[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[100.0, 0.0, 50.0], [100.0, 1.0, 50.0]]);
        let pred = two_pose_scene(&[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[100.0, 0.0, 0.0], [100.0, 1.0, 0.0]]);
        assert_abs_diff_eq!(
            root_displacement_error(&pred, &gt, RdeVariant::Vector).unwrap(),
            50.0,
            epsilon = 1e-12
        );
        let swapped = root_displacement_error(&pred.reordered(&[1, 0]), &gt.reordered(&[1, 0]), RdeVariant::Vector)
            .unwrap();
        assert_abs_diff_eq!(swapped, 50.0, epsilon = 1e-12);
        let mag = root_displacement_error(&pred, &gt, RdeVariant::Magnitude).unwrap();
        assert_abs_diff_eq!(mag, 12500f64.sqrt() - 100.0, epsilon = 1e-12);
        assert_eq!(root_displacement_error(&gt, &gt, RdeVariant::Vector).unwrap(), 0.0);
    }

    #[test]
    fn scale_error_five_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gt = random_scene(&mut rng, 2, 6);
        let roots: Vec<Vector3<f64>> = gt.root_offsets().to_vec();
        let poses = gt
            .poses()
            .iter()
            .zip(&roots)
            .map(|(p, r)| Pose3D::new(p.coords.iter().map(|x| r + (x - r) * 1.05).collect()))
            .collect();
        let pred = Scene3D::new(poses, gt.root()).unwrap();
        let se = scale_error(&pred, &gt).unwrap();
        assert_abs_diff_eq!(se.signed_percent, 5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(se.abs_percent, 5.0, epsilon = 1e-9);
        let zero = scale_error(&gt, &gt).unwrap();
        assert_eq!((zero.signed, zero.signed_percent), (0.0, 0.0));
    }

    #[test]
    fn scale_error_rejects_zero_norm_gt() {
        let gt = two_pose_scene(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]], &[[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]);
        assert!(matches!(scale_error(&gt, &gt), Err(Error::ZeroNormPose(0))));
    }

    #[test]
    fn report_csv_has_documented_columns() {
        let gt = two_pose_scene(&[[0.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[2.0, 0.0, 0.0], [2.0, 1.0, 0.5]]);
        let m = evaluate_frame(3, &gt, &gt, 500.0, RdeVariant::Vector).unwrap();
        let report = MetricReport::new(AblationMode::FULL, RdeVariant::Vector, vec![m]);
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), REPORT_CSV_COLUMNS.join(","));
        assert!(lines.next().unwrap().starts_with("3,1,1,1,"));
        assert!(lines.next().unwrap().starts_with("aggregate,1,1,1,"));
    }

    #[test]
    fn rotated_prediction_aligns_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let gt = random_scene(&mut rng, 3, 5);
        let r = rotation_about_x(ElevationAngle::new(0.9).unwrap());
        let yaw = Rotation3::from_euler_angles(0.0, 1.2, 0.3);
        let pred = gt.map_joints(|p| yaw * r.apply(p) * 0.3 + Vector3::new(5.0, -2.0, 1.0));
        assert!(pa_mpjpe(&pred, &gt).unwrap() < 1e-9);
    }
}
