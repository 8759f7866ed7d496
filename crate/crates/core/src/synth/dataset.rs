//! On-disk layout of a generated dataset:
//!
//! ```text
//! <dir>/scene_spec.json        generation parameters and elevation strata
//! <dir>/skeleton.json
//! <dir>/frames/NNNN.json       2D keypoints in pixels
//! <dir>/gt/NNNN.json           world and camera-frame 3D, angles, offsets
//! <dir>/predictions/oracle.json
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{Vector2, Vector3};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_frame, CameraConfig, GroundTruthFrame, PersonTruth, PoseLibrary, SceneSpec};
use crate::error::{Error, Result};
use crate::geometry::ElevationAngle;
use crate::io::{read_json, write_json};
use crate::lifter::{LiftPrediction, PredictionStore};
use crate::pose::{normalize_pose, Pose3D};
use crate::rng::keyed_rng;
use crate::skeleton::Skeleton;

pub const DATASET_SCHEMA_VERSION: u32 = 1;

/// How camera elevation varies across frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CameraSweep {
    /// Round-robin over the list, so every stratum gets an equal share.
    Fixed { elevations_deg: Vec<f64> },
    Uniform { min_deg: f64, max_deg: f64 },
}

impl Default for CameraSweep {
    fn default() -> Self {
        CameraSweep::Fixed {
            elevations_deg: vec![0.0, 10.0, 20.0, 30.0, 40.0],
        }
    }
}

impl CameraSweep {
    pub fn validate(&self) -> Result<()> {
        let ok = |d: f64| d.is_finite() && d.abs() < 80.0;
        match self {
            CameraSweep::Fixed { elevations_deg } => {
                if elevations_deg.is_empty() || !elevations_deg.iter().all(|&d| ok(d)) {
                    return Err(Error::InvalidSpec(
                        "fixed sweep needs at least one elevation in (-80, 80) degrees".into(),
                    ));
                }
            }
            CameraSweep::Uniform { min_deg, max_deg } => {
                if !(ok(*min_deg) && ok(*max_deg) && min_deg <= max_deg) {
                    return Err(Error::InvalidSpec(
                        "uniform sweep needs -80 < min_deg <= max_deg < 80".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn elevation_deg(&self, seed: u64, frame_id: u64) -> f64 {
        match self {
            CameraSweep::Fixed { elevations_deg } => {
                elevations_deg[(frame_id % elevations_deg.len() as u64) as usize]
            }
            CameraSweep::Uniform { min_deg, max_deg } => {
                if min_deg == max_deg {
                    return *min_deg;
                }
                keyed_rng(seed, frame_id, 0, b"camera\0\0").random_range(*min_deg..=*max_deg)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stratum {
    pub elevation_deg: f64,
    pub frames: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub version: u32,
    pub frames: usize,
    pub scene: SceneSpec,
    /// Intrinsics and `c`; the elevation is taken from `sweep`.
    pub camera: CameraConfig,
    pub sweep: CameraSweep,
    /// Frame counts per elevation for fixed sweeps; empty otherwise.
    #[serde(default)]
    pub strata: Vec<Stratum>,
}

impl DatasetConfig {
    pub fn new(frames: usize, scene: SceneSpec, camera: CameraConfig, sweep: CameraSweep) -> Self {
        let strata = match &sweep {
            CameraSweep::Fixed { elevations_deg } => {
                let n = elevations_deg.len();
                elevations_deg
                    .iter()
                    .enumerate()
                    .map(|(i, &e)| Stratum {
                        elevation_deg: e,
                        frames: frames / n + usize::from(i < frames % n),
                    })
                    .collect()
            }
            CameraSweep::Uniform { .. } => Vec::new(),
        };
        Self {
            version: DATASET_SCHEMA_VERSION,
            frames,
            scene,
            camera,
            sweep,
            strata,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != DATASET_SCHEMA_VERSION {
            return Err(Error::schema(
                "scene_spec.json:version",
                format!("unsupported version {}", self.version),
            ));
        }
        self.sweep.validate()?;
        self.camera.validate()?;
        self.scene.validate(&self.camera)
    }

    pub fn camera_for(&self, frame_id: u64) -> CameraConfig {
        self.camera
            .with_elevation(self.sweep.elevation_deg(self.scene.seed, frame_id))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramePose {
    pub pose_id: u64,
    /// Pixel coordinates in skeleton order, v pointing down.
    pub keypoints: Vec<Vector2<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameFile {
    pub version: u32,
    pub frame_id: u64,
    pub elevation_deg: f64,
    pub pixels_per_unit: f64,
    pub principal_point_px: [f64; 2],
    pub poses: Vec<FramePose>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GtPose {
    pub pose_id: u64,
    pub kind: PoseLibrary,
    pub theta_radians: f64,
    pub camera_center: Vector3<f64>,
    pub world: Pose3D,
    pub camera_frame: Pose3D,
    pub depth_offsets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GtFile {
    pub version: u32,
    pub frame_id: u64,
    pub c: f64,
    pub camera_height: f64,
    pub mm_per_unit: f64,
    pub contact_snapped: bool,
    pub poses: Vec<GtPose>,
}

fn frame_name(frame_id: u64) -> String {
    format!("{frame_id:04}.json")
}

impl GroundTruthFrame {
    pub fn to_files(&self) -> (FrameFile, GtFile) {
        let frame = FrameFile {
            version: DATASET_SCHEMA_VERSION,
            frame_id: self.frame_id,
            elevation_deg: self.camera.elevation_deg,
            pixels_per_unit: self.camera.pixels_per_unit,
            principal_point_px: self.camera.principal_point_px,
            poses: self
                .persons
                .iter()
                .map(|p| FramePose {
                    pose_id: p.pose_id,
                    keypoints: p.pose_2d.pixel_coords().to_vec(),
                })
                .collect(),
        };
        let gt = GtFile {
            version: DATASET_SCHEMA_VERSION,
            frame_id: self.frame_id,
            c: self.camera.c,
            camera_height: self.camera_height,
            mm_per_unit: self.mm_per_unit,
            contact_snapped: self.contact_snapped,
            poses: self
                .persons
                .iter()
                .map(|p| GtPose {
                    pose_id: p.pose_id,
                    kind: p.kind,
                    theta_radians: p.theta.radians(),
                    camera_center: p.camera_center,
                    world: p.world.clone(),
                    camera_frame: p.camera_frame.clone(),
                    depth_offsets: p.depth_offsets.clone(),
                })
                .collect(),
        };
        (frame, gt)
    }

    pub fn from_files(
        frame: FrameFile,
        gt: GtFile,
        camera: &CameraConfig,
        skeleton: &Skeleton,
    ) -> Result<Self> {
        let loc = format!("frames/{}", frame_name(frame.frame_id));
        if frame.version != DATASET_SCHEMA_VERSION || gt.version != DATASET_SCHEMA_VERSION {
            return Err(Error::schema(&loc, "unsupported version"));
        }
        if frame.frame_id != gt.frame_id || frame.poses.len() != gt.poses.len() {
            return Err(Error::schema(&loc, "frame and ground-truth files disagree"));
        }
        let mut persons = Vec::with_capacity(gt.poses.len());
        for (i, (fp, gp)) in frame.poses.into_iter().zip(gt.poses).enumerate() {
            if fp.pose_id != gp.pose_id {
                return Err(Error::schema(format!("{loc}:poses[{i}]"), "pose_id mismatch"));
            }
            let raw: Vec<_> = fp.keypoints.into_iter().map(Some).collect();
            let pose_2d = normalize_pose(&raw, skeleton, gt.c)?;
            let theta = ElevationAngle::new(gp.theta_radians).map_err(|e| {
                Error::schema(format!("gt/{}:poses[{i}]", frame_name(gt.frame_id)), e.to_string())
            })?;
            persons.push(PersonTruth {
                pose_id: gp.pose_id,
                kind: gp.kind,
                theta,
                camera_center: gp.camera_center,
                world: gp.world,
                camera_frame: gp.camera_frame,
                pose_2d,
                depth_offsets: gp.depth_offsets,
            });
        }
        let out = GroundTruthFrame {
            frame_id: frame.frame_id,
            camera: CameraConfig {
                elevation_deg: frame.elevation_deg,
                c: gt.c,
                pixels_per_unit: frame.pixels_per_unit,
                principal_point_px: frame.principal_point_px,
            },
            camera_height: gt.camera_height,
            mm_per_unit: gt.mm_per_unit,
            contact_snapped: gt.contact_snapped,
            persons,
        };
        if out.camera.c != camera.c {
            return Err(Error::schema(&loc, "c differs from scene_spec.json"));
        }
        out.validate(skeleton)?;
        Ok(out)
    }
}

/// Oracle predictions for every pose of every frame.
pub fn oracle_predictions(frames: &[GroundTruthFrame]) -> Result<PredictionStore> {
    let mut store = PredictionStore::new();
    for fr in frames {
        for p in &fr.persons {
            store.insert(
                fr.frame_id,
                p.pose_id,
                LiftPrediction::new(p.depth_offsets.clone(), p.theta),
            )?;
        }
    }
    Ok(store)
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub config: DatasetConfig,
    pub skeleton: Skeleton,
    pub frames: Vec<GroundTruthFrame>,
}

impl Dataset {
    /// Generates in memory; frames are produced in parallel but the result
    /// only depends on the configuration.
    pub fn generate(config: DatasetConfig, skeleton: Skeleton) -> Result<Self> {
        config.validate()?;
        let frames = (0..config.frames as u64)
            .into_par_iter()
            .map(|i| generate_frame(&config.scene, &config.camera_for(i), &skeleton, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config,
            skeleton,
            frames,
        })
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join("scene_spec.json"), &self.config)?;
        write_json(&dir.join("skeleton.json"), &self.skeleton.to_file())?;
        self.frames.par_iter().try_for_each(|fr| {
            let (frame, gt) = fr.to_files();
            let name = frame_name(fr.frame_id);
            write_json(&dir.join("frames").join(&name), &frame)?;
            write_json(&dir.join("gt").join(&name), &gt)
        })?;
        oracle_predictions(&self.frames)?.save(&dir.join("predictions").join("oracle.json"))
    }

    /// Elevation of each frame's camera, keyed for stratified reporting.
    pub fn frames_by_elevation(&self) -> BTreeMap<String, Vec<u64>> {
        let mut out: BTreeMap<String, Vec<u64>> = BTreeMap::new();
        for fr in &self.frames {
            out.entry(format!("{:.1}", fr.camera.elevation_deg))
                .or_default()
                .push(fr.frame_id);
        }
        out
    }
}

pub fn generate_dataset(dir: &Path, config: DatasetConfig, skeleton: Skeleton) -> Result<Dataset> {
    let ds = Dataset::generate(config, skeleton)?;
    ds.save(dir)?;
    Ok(ds)
}

/// Loads and re-validates a dataset written by [`generate_dataset`].
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let config: DatasetConfig = read_json(&dir.join("scene_spec.json"))?;
    config.validate()?;
    let skeleton = Skeleton::load(&dir.join("skeleton.json"))?;
    let frames = (0..config.frames as u64)
        .into_par_iter()
        .map(|i| {
            let name = frame_name(i);
            let frame: FrameFile = read_json(&dir.join("frames").join(&name))?;
            let gt: GtFile = read_json(&dir.join("gt").join(&name))?;
            if frame.frame_id != i {
                return Err(Error::schema(
                    format!("frames/{name}:frame_id"),
                    format!("expected {i}, found {}", frame.frame_id),
                ));
            }
            GroundTruthFrame::from_files(frame, gt, &config.camera, &skeleton)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset {
        config,
        skeleton,
        frames,
    })
}
