//! Synthetic two-person scenes with exact ground truth.
//!
//! Each person is seen by a virtual pinhole camera that shares the scene
//! camera's height but is translated sideways to face that person and
//! pitched so the pelvis lies on its optical axis. The pitch is the pose's
//! true elevation angle. The pelvis sits `depth` units away horizontally and
//! the upper body is scaled so the projected head lands exactly `1/c` from
//! the root. With the default zero depth separation, lifting and composing
//! oracle predictions reproduces the world scene up to a translation.

mod body;
mod dataset;

use nalgebra::{Vector2, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use body::{Articulation, Limb, LocalBody, PoseLibrary};
pub use dataset::{
    generate_dataset, load_dataset, oracle_predictions, CameraSweep, Dataset, DatasetConfig, FrameFile, FramePose,
    GtFile, GtPose, Stratum, DATASET_SCHEMA_VERSION,
};

use crate::error::{Error, Result};
use crate::geometry::{rotation_about_x, ElevationAngle};
use crate::lifter::PoseTruth;
use crate::pose::{normalize_pose, Pose2D, Pose3D, Scene3D};
use crate::rng::keyed_rng;
use crate::skeleton::Skeleton;

/// Rejection-sampling budget per frame before the scene spec is declared
/// unsatisfiable.
pub const MAX_ATTEMPTS: usize = 512;
/// Allowed ratio of upper-body to leg scale.
const UPPER_TO_LEG: (f64, f64) = (0.5, 2.0);
/// Minimum camera-frame depth of any joint.
const MIN_JOINT_DEPTH: f64 = 1.5;
/// Joints may not sink further than this below the ground plane.
const GROUND_SLACK: f64 = 0.05;
/// Target mean head-to-pelvis distance, used to fix the millimetre scale.
pub const HEAD_PELVIS_MM: f64 = 500.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraConfig {
    /// Pitch below horizontal when aimed at the midpoint of the two pelvises.
    pub elevation_deg: f64,
    pub c: f64,
    /// Focal length in pixels.
    pub pixels_per_unit: f64,
    pub principal_point_px: [f64; 2],
}

impl Default for CameraConfig {
    fn default() -> Self {
        Self {
            elevation_deg: 15.0,
            c: 10.0,
            pixels_per_unit: 1000.0,
            principal_point_px: [960.0, 540.0],
        }
    }
}

impl CameraConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.elevation_deg.is_finite() && self.elevation_deg.abs() < 80.0) {
            return Err(Error::InvalidSpec(format!(
                "elevation_deg must lie in (-80, 80), got {}",
                self.elevation_deg
            )));
        }
        if !(self.c.is_finite() && self.c > 2.0) {
            return Err(Error::InvalidSpec(format!("c must be > 2, got {}", self.c)));
        }
        if !(self.pixels_per_unit.is_finite() && self.pixels_per_unit > 0.0) {
            return Err(Error::InvalidSpec("pixels_per_unit must be > 0".into()));
        }
        if !self.principal_point_px.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidSpec("principal_point_px must be finite".into()));
        }
        Ok(())
    }

    pub fn with_elevation(&self, elevation_deg: f64) -> Self {
        Self {
            elevation_deg,
            ..self.clone()
        }
    }
}

/// Sampling ranges for a scene; each `[lo, hi]` pair is inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneSpec {
    pub seed: u64,
    /// Leg-length scale; a scale of 1 puts a straight-legged pelvis 0.9 units up.
    pub person_scale: [f64; 2],
    pub horizontal_separation: [f64; 2],
    /// Extra horizontal distance of the second person beyond `c`.
    pub depth_separation: [f64; 2],
    /// Allowed `y2 - y1` pelvis height difference.
    pub root_height_difference: [f64; 2],
    /// Pelvis pairs closer than this vertically in the image are levelled,
    /// modelling people standing on the same floor.
    pub contact_gap_px: f64,
    pub pose_library: PoseLibrary,
    /// Yaw jitter around facing each other.
    pub facing_jitter_deg: f64,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            person_scale: [1.5, 1.9],
            horizontal_separation: [1.0, 3.0],
            depth_separation: [0.0, 0.0],
            root_height_difference: [-1.0, 1.0],
            contact_gap_px: 50.0,
            pose_library: PoseLibrary::Mixed,
            facing_jitter_deg: 30.0,
        }
    }
}

fn check_range(name: &str, r: [f64; 2]) -> Result<()> {
    if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
        return Err(Error::InvalidSpec(format!(
            "{name} must be a finite [lo, hi] range, got {r:?}"
        )));
    }
    Ok(())
}

fn sample_range<R: Rng + ?Sized>(rng: &mut R, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..=r[1])
    }
}

impl SceneSpec {
    pub fn validate(&self, camera: &CameraConfig) -> Result<()> {
        check_range("person_scale", self.person_scale)?;
        check_range("horizontal_separation", self.horizontal_separation)?;
        check_range("depth_separation", self.depth_separation)?;
        check_range("root_height_difference", self.root_height_difference)?;
        if self.person_scale[0] <= 0.0 {
            return Err(Error::InvalidSpec("person_scale must be positive".into()));
        }
        if self.horizontal_separation[0] <= 0.0 {
            return Err(Error::InvalidSpec(
                "horizontal_separation must be positive so the poses are ordered".into(),
            ));
        }
        if camera.c + self.depth_separation[0] < 2.0 * MIN_JOINT_DEPTH {
            return Err(Error::InvalidSpec(format!(
                "depth_separation {:?} brings the second person too close to the camera",
                self.depth_separation
            )));
        }
        if !(self.contact_gap_px.is_finite() && self.contact_gap_px >= 0.0) {
            return Err(Error::InvalidSpec("contact_gap_px must be >= 0".into()));
        }
        if !(self.facing_jitter_deg.is_finite() && (0.0..=90.0).contains(&self.facing_jitter_deg)) {
            return Err(Error::InvalidSpec("facing_jitter_deg must lie in [0, 90]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersonTruth {
    pub pose_id: u64,
    pub kind: PoseLibrary,
    pub theta: ElevationAngle,
    /// Centre of this person's virtual camera in world coordinates.
    pub camera_center: Vector3<f64>,
    pub world: Pose3D,
    pub camera_frame: Pose3D,
    pub pose_2d: Pose2D,
    /// `Z - c` for every joint of `camera_frame`.
    pub depth_offsets: Vec<f64>,
}

impl PersonTruth {
    pub fn truth(&self) -> PoseTruth {
        PoseTruth {
            depth_offsets: self.depth_offsets.clone(),
            theta: self.theta,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthFrame {
    pub frame_id: u64,
    pub camera: CameraConfig,
    pub camera_height: f64,
    pub mm_per_unit: f64,
    /// Whether the second person was levelled onto the first's floor.
    pub contact_snapped: bool,
    pub persons: Vec<PersonTruth>,
}

impl GroundTruthFrame {
    pub fn poses_2d(&self) -> Vec<Pose2D> {
        self.persons.iter().map(|p| p.pose_2d.clone()).collect()
    }

    pub fn truths(&self) -> Vec<PoseTruth> {
        self.persons.iter().map(PersonTruth::truth).collect()
    }

    pub fn world_scene(&self, skeleton: &Skeleton) -> Result<Scene3D> {
        Scene3D::new(
            self.persons.iter().map(|p| p.world.clone()).collect(),
            skeleton.root(),
        )
    }

    /// World height of each pelvis.
    pub fn root_heights(&self, skeleton: &Skeleton) -> Vec<f64> {
        self.persons
            .iter()
            .map(|p| p.world.joint(skeleton.root()).y)
            .collect()
    }

    /// Checks the invariants the generator guarantees; used when loading a
    /// dataset from disk.
    pub fn validate(&self, skeleton: &Skeleton) -> Result<()> {
        let c = self.camera.c;
        let loc = |k: usize, what: &str| format!("frame {} pose {k} {what}", self.frame_id);
        let mut lowest_foot = f64::INFINITY;
        for (k, p) in self.persons.iter().enumerate() {
            if p.world.len() != skeleton.len()
                || p.camera_frame.len() != skeleton.len()
                || p.depth_offsets.len() != skeleton.len()
            {
                return Err(Error::schema(loc(k, "joints"), "joint count differs from skeleton"));
            }
            let m = rotation_about_x(p.theta).transpose();
            let root = p.world.joint(skeleton.root());
            let rel = root - p.camera_center;
            let expected = (-rel.y).atan2(rel.z);
            if (expected - p.theta.radians()).abs() > 1e-9 {
                return Err(Error::schema(
                    loc(k, "theta_radians"),
                    format!("{} disagrees with the pelvis ray {expected}", p.theta.radians()),
                ));
            }
            for (j, (w, cam)) in p.world.coords.iter().zip(&p.camera_frame.coords).enumerate() {
                if (m.apply(&(w - p.camera_center)) - cam).norm() > 1e-9 {
                    return Err(Error::schema(
                        loc(k, &format!("camera_frame[{j}]")),
                        "inconsistent with world joint and camera pose",
                    ));
                }
                if cam.z < MIN_JOINT_DEPTH {
                    return Err(Error::schema(loc(k, &format!("camera_frame[{j}]")), "too close to the camera"));
                }
                if (p.depth_offsets[j] - (cam.z - c)).abs() > 1e-9 {
                    return Err(Error::schema(loc(k, &format!("depth_offsets[{j}]")), "not Z - c"));
                }
                let proj = Vector2::new(cam.x / cam.z, cam.y / cam.z);
                if (proj - p.pose_2d.norm_coords()[j]).norm() > 1e-9 {
                    return Err(Error::schema(
                        loc(k, &format!("keypoints[{j}]")),
                        "does not match the projection of the camera-frame joint",
                    ));
                }
            }
            for &f in skeleton.feet() {
                lowest_foot = lowest_foot.min(p.world.joint(f).y);
            }
        }
        if lowest_foot.abs() > 1e-9 {
            return Err(Error::schema(
                format!("frame {}", self.frame_id),
                format!("lowest foot is at y={lowest_foot}, expected 0"),
            ));
        }
        Ok(())
    }
}

/// The skeleton must name only joints the body model knows, with the usual
/// pelvis/head/hip roles.
pub fn check_generator_skeleton(skeleton: &Skeleton) -> Result<()> {
    let probe = LocalBody::build(&Articulation {
        kind: PoseLibrary::Standing,
        lean_forward: 0.0,
        lean_side: 0.0,
        legs: [Limb::default(); 2],
        arms: [Limb::default(); 2],
    });
    for name in skeleton.names() {
        if probe.get(name).is_none() {
            return Err(Error::InvalidSkeleton(format!(
                "the synthetic body has no joint `{name}`"
            )));
        }
    }
    let roles = [
        (skeleton.root(), "pelvis"),
        (skeleton.head(), "head"),
        (skeleton.left_hip(), "l_hip"),
        (skeleton.right_hip(), "r_hip"),
    ];
    for (id, want) in roles {
        if skeleton.name(id) != want {
            return Err(Error::InvalidSkeleton(format!(
                "generator expects `{want}` in that role, got `{}`",
                skeleton.name(id)
            )));
        }
    }
    for &f in skeleton.feet() {
        if !matches!(skeleton.name(f), "l_foot" | "r_foot") {
            return Err(Error::InvalidSkeleton("feet must be l_foot / r_foot".into()));
        }
    }
    Ok(())
}

/// Generates frame `frame_id`; identical inputs give identical output.
pub fn generate_frame(
    spec: &SceneSpec,
    camera: &CameraConfig,
    skeleton: &Skeleton,
    frame_id: u64,
) -> Result<GroundTruthFrame> {
    camera.validate()?;
    spec.validate(camera)?;
    check_generator_skeleton(skeleton)?;
    let mut rng = keyed_rng(spec.seed, frame_id, 0, b"scene\0\0\0");
    for _ in 0..MAX_ATTEMPTS {
        if let Some(frame) = try_frame(spec, camera, skeleton, frame_id, &mut rng)? {
            return Ok(frame);
        }
    }
    Err(Error::InvalidSpec(format!(
        "no valid scene after {MAX_ATTEMPTS} attempts for frame {frame_id}; \
         the sampling ranges are probably contradictory"
    )))
}

struct Person {
    kind: PoseLibrary,
    body: LocalBody,
    yaw: f64,
    leg_scale: f64,
}

fn try_frame(
    spec: &SceneSpec,
    camera: &CameraConfig,
    skeleton: &Skeleton,
    frame_id: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Option<GroundTruthFrame>> {
    let c = camera.c;
    let f = camera.pixels_per_unit;
    let phi = camera.elevation_deg.to_radians();
    let jitter = spec.facing_jitter_deg.to_radians();

    let mut people: Vec<Person> = (0..2)
        .map(|k| {
            let art = Articulation::sample(spec.pose_library, rng);
            let facing = if k == 0 { 1.0 } else { -1.0 } * std::f64::consts::FRAC_PI_2;
            let yaw = facing + if jitter > 0.0 { rng.random_range(-jitter..=jitter) } else { 0.0 };
            Person {
                kind: art.kind,
                body: LocalBody::build(&art),
                yaw,
                leg_scale: sample_range(rng, spec.person_scale),
            }
        })
        .collect();
    let sep = sample_range(rng, spec.horizontal_separation);
    let dz = sample_range(rng, spec.depth_separation);
    let xs = [-sep / 2.0, sep / 2.0];
    let depths = [c, c + dz];

    let mut heights: Vec<f64> = people
        .iter()
        .map(|p| p.leg_scale * p.body.pelvis_height())
        .collect();
    let range = spec.root_height_difference;
    if !(range[0]..=range[1]).contains(&(heights[1] - heights[0])) {
        return Ok(None);
    }

    let solve = |heights: &[f64]| {
        let mid_y = 0.5 * (heights[0] + heights[1]);
        let mid_d = 0.5 * (depths[0] + depths[1]);
        let h = mid_y + mid_d * phi.tan();
        let thetas: Vec<f64> = (0..2).map(|k| (h - heights[k]).atan2(depths[k])).collect();
        (h, thetas)
    };
    let (mut cam_h, mut thetas) = solve(&heights);
    let gap = f * ((thetas[0] - phi).tan() - (thetas[1] - phi).tan()).abs();
    let mut snapped = false;
    if gap <= spec.contact_gap_px + 1e-6 && heights[0] != heights[1] {
        if !(range[0]..=range[1]).contains(&0.0) {
            return Ok(None);
        }
        people[1].leg_scale = heights[0] / people[1].body.pelvis_height();
        if !(spec.person_scale[0]..=spec.person_scale[1]).contains(&people[1].leg_scale) {
            return Ok(None);
        }
        heights[1] = heights[0];
        (cam_h, thetas) = solve(&heights);
        snapped = true;
    }

    let mut persons = Vec::with_capacity(2);
    let mut head_pelvis = 0.0;
    for (k, person) in people.iter().enumerate() {
        let theta = ElevationAngle::new(thetas[k])?;
        let r = rotation_about_x(theta);
        let m = r.transpose();
        let pelvis = Vector3::new(xs[k], heights[k], depths[k]);
        let center = Vector3::new(xs[k], cam_h, 0.0);
        let rho = (depths[k]).hypot(cam_h - heights[k]);
        let yaw = body::yaw_rotation(person.yaw);

        let w = m.apply(&(yaw * person.body.head()));
        let denom = c * w.x.hypot(w.y) - w.z;
        if denom <= 1e-9 {
            return Ok(None);
        }
        let upper_scale = rho / denom;
        let ratio = upper_scale / person.leg_scale;
        if !(UPPER_TO_LEG.0..=UPPER_TO_LEG.1).contains(&ratio) {
            return Ok(None);
        }

        let mut world: Vec<Vector3<f64>> = skeleton
            .names()
            .iter()
            .map(|name| {
                let (off, upper) = person.body.get(name).expect("checked skeleton");
                let s = if upper { upper_scale } else { person.leg_scale };
                pelvis + yaw * (off * s)
            })
            .collect();
        if world.iter().any(|p| p.y < -GROUND_SLACK) {
            return Ok(None);
        }

        let to_cam = |p: &Vector3<f64>| m.apply(&(p - center));
        let mut cam: Vec<Vector3<f64>> = world.iter().map(to_cam).collect();
        // Perspective moves the image of the 3D hip midpoint off the 2D hip
        // midpoint; slide the right hip along its depth so the 2D midpoint
        // coincides with the projected pelvis.
        let (li, ri, pi) = (skeleton.left_hip().0, skeleton.right_hip().0, skeleton.root().0);
        let proj = |v: &Vector3<f64>| Vector2::new(v.x / v.z, v.y / v.z);
        let target = 2.0 * proj(&cam[pi]) - proj(&cam[li]);
        let rz = cam[ri].z;
        cam[ri] = Vector3::new(target.x * rz, target.y * rz, rz);
        world[ri] = center + r.apply(&cam[ri]);

        if cam.iter().any(|p| p.z < MIN_JOINT_DEPTH) {
            return Ok(None);
        }

        let origin = Vector2::new(
            camera.principal_point_px[0] + f * xs[k] / depths[k],
            camera.principal_point_px[1] + f * (thetas[k] - phi).tan(),
        );
        let pixels: Vec<Option<Vector2<f64>>> = cam
            .iter()
            .map(|p| Some(origin + f * Vector2::new(p.x / p.z, -p.y / p.z)))
            .collect();
        let pose_2d = normalize_pose(&pixels, skeleton, c)?;

        head_pelvis += (world[skeleton.head().0] - world[pi]).norm();
        persons.push(PersonTruth {
            pose_id: k as u64,
            kind: person.kind,
            theta,
            camera_center: center,
            depth_offsets: cam.iter().map(|p| p.z - c).collect(),
            world: Pose3D::new(world),
            camera_frame: Pose3D::new(cam),
            pose_2d,
        });
    }

    Ok(Some(GroundTruthFrame {
        frame_id,
        camera: camera.clone(),
        camera_height: cam_h,
        mm_per_unit: HEAD_PELVIS_MM / (head_pelvis / persons.len() as f64),
        contact_snapped: snapped,
        persons,
    }))
}
