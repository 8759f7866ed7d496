//! The predictor contract that stands in for a learned 2D-to-3D lifter.
//!
//! A predictor sees one normalized pose at a time and returns per-joint
//! depth offsets plus an elevation angle. Three implementations exist: an
//! oracle that reads the synthetic ground truth, a seeded noisy oracle, and
//! a file-backed store for predictions produced elsewhere.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ElevationAngle;
use crate::pose::Pose2D;
use crate::rng::keyed_rng;

pub const PREDICTION_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LiftPrediction {
    depth_offsets: Vec<f64>,
    theta: ElevationAngle,
}

impl LiftPrediction {
    pub fn new(depth_offsets: Vec<f64>, theta: ElevationAngle) -> Self {
        Self {
            depth_offsets,
            theta,
        }
    }

    pub fn depth_offsets(&self) -> &[f64] {
        &self.depth_offsets
    }

    pub fn theta(&self) -> ElevationAngle {
        self.theta
    }
}

/// Ground truth for one pose, as an oracle predictor consumes it.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseTruth {
    pub depth_offsets: Vec<f64>,
    pub theta: ElevationAngle,
}

/// Identifies the pose being predicted and optionally carries its truth.
#[derive(Debug, Clone, Copy)]
pub struct PredictContext<'a> {
    pub frame_id: u64,
    pub pose_id: u64,
    pub truth: Option<&'a PoseTruth>,
}

pub trait Predictor: Send + Sync {
    fn predict(&self, pose: &Pose2D, ctx: &PredictContext<'_>) -> Result<LiftPrediction>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OraclePredictor;

impl Predictor for OraclePredictor {
    fn predict(&self, pose: &Pose2D, ctx: &PredictContext<'_>) -> Result<LiftPrediction> {
        let truth = ctx.truth.ok_or(Error::MissingGroundTruth)?;
        if truth.depth_offsets.len() != pose.len() {
            return Err(Error::JointCountMismatch {
                expected: pose.len(),
                actual: truth.depth_offsets.len(),
            });
        }
        Ok(LiftPrediction::new(truth.depth_offsets.clone(), truth.theta))
    }
}

/// Oracle output corrupted by zero-mean Gaussian noise.
///
/// The noise stream is keyed by `(seed, frame_id, pose_id)`, so results do
/// not depend on evaluation order.
///
/// By default the angle noise is independent per pose. `theta_correlation`
/// (in `[0, 1]`) mixes in a component shared by every pose of a frame, as
/// a lifter that misjudges the camera pitch would produce; the marginal
/// standard deviation stays `sigma_theta`.
#[derive(Debug, Clone, Copy)]
pub struct NoisyOraclePredictor {
    pub sigma_d: f64,
    pub sigma_theta: f64,
    pub seed: u64,
    pub theta_correlation: f64,
}

impl NoisyOraclePredictor {
    pub fn new(sigma_d: f64, sigma_theta: f64, seed: u64) -> Result<Self> {
        if !(sigma_d.is_finite() && sigma_d >= 0.0 && sigma_theta.is_finite() && sigma_theta >= 0.0)
        {
            return Err(Error::InvalidSpec(format!(
                "noise levels must be >= 0, got sigma_d={sigma_d} sigma_theta={sigma_theta}"
            )));
        }
        Ok(Self {
            sigma_d,
            sigma_theta,
            seed,
            theta_correlation: 0.0,
        })
    }

    pub fn with_theta_correlation(mut self, rho: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidSpec(format!(
                "theta_correlation must lie in [0, 1], got {rho}"
            )));
        }
        self.theta_correlation = rho;
        Ok(self)
    }

    fn rng(&self, frame_id: u64, pose_id: u64) -> ChaCha8Rng {
        keyed_rng(self.seed, frame_id, pose_id, b"lifter\0\0")
    }
}

impl Predictor for NoisyOraclePredictor {
    fn predict(&self, pose: &Pose2D, ctx: &PredictContext<'_>) -> Result<LiftPrediction> {
        let clean = OraclePredictor.predict(pose, ctx)?;
        let mut rng = self.rng(ctx.frame_id, ctx.pose_id);
        let unit = Normal::new(0.0, 1.0).expect("unit normal");
        let mut z = unit.sample(&mut rng);
        if self.theta_correlation > 0.0 {
            let rho = self.theta_correlation;
            let shared = unit.sample(&mut self.rng(ctx.frame_id, u64::MAX));
            z = rho.sqrt() * shared + (1.0 - rho).sqrt() * z;
        }
        let theta_noise = z * self.sigma_theta;
        let theta = ElevationAngle::new(clean.theta.radians() + theta_noise)?;
        let offsets = clean
            .depth_offsets
            .iter()
            .map(|d| d + unit.sample(&mut rng) * self.sigma_d)
            .collect();
        Ok(LiftPrediction::new(offsets, theta))
    }
}

/// Predictions loaded from disk, keyed by `(frame_id, pose_id)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictionStore {
    entries: BTreeMap<(u64, u64), LiftPrediction>,
}

impl PredictionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, frame_id: u64, pose_id: u64, p: LiftPrediction) -> Result<()> {
        if self.entries.insert((frame_id, pose_id), p).is_some() {
            return Err(Error::schema(
                format!("frames[frame_id={frame_id}].poses[pose_id={pose_id}]"),
                "duplicate (frame_id, pose_id)",
            ));
        }
        Ok(())
    }

    pub fn get(&self, frame_id: u64, pose_id: u64) -> Result<&LiftPrediction> {
        self.entries
            .get(&(frame_id, pose_id))
            .ok_or(Error::PredictionNotFound { frame_id, pose_id })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u64, u64), &LiftPrediction)> {
        self.entries.iter()
    }

    pub fn to_file(&self) -> PredictionFile {
        let mut frames: Vec<FramePredictions> = Vec::new();
        for (&(frame_id, pose_id), p) in &self.entries {
            if frames.last().map(|f| f.frame_id) != Some(frame_id) {
                frames.push(FramePredictions {
                    frame_id,
                    poses: Vec::new(),
                });
            }
            frames.last_mut().unwrap().poses.push(PosePrediction {
                pose_id,
                theta_radians: p.theta.radians(),
                depth_offsets: p.depth_offsets.clone(),
            });
        }
        PredictionFile {
            version: PREDICTION_SCHEMA_VERSION,
            frames,
        }
    }

    pub fn from_file(file: PredictionFile) -> Result<Self> {
        if file.version != PREDICTION_SCHEMA_VERSION {
            return Err(Error::schema(
                "version",
                format!("unsupported version {}", file.version),
            ));
        }
        let mut store = Self::new();
        for (fi, frame) in file.frames.into_iter().enumerate() {
            for (pi, pose) in frame.poses.into_iter().enumerate() {
                let theta = ElevationAngle::new(pose.theta_radians).map_err(|e| {
                    Error::schema(format!("frames[{fi}].poses[{pi}].theta_radians"), e.to_string())
                })?;
                if let Some(j) = pose.depth_offsets.iter().position(|d| !d.is_finite()) {
                    return Err(Error::schema(
                        format!("frames[{fi}].poses[{pi}].depth_offsets[{j}]"),
                        "non-finite value",
                    ));
                }
                store.insert(
                    frame.frame_id,
                    pose.pose_id,
                    LiftPrediction::new(pose.depth_offsets, theta),
                )?;
            }
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::io::write_json(path, &self.to_file())
    }
}

impl Predictor for PredictionStore {
    fn predict(&self, pose: &Pose2D, ctx: &PredictContext<'_>) -> Result<LiftPrediction> {
        let p = self.get(ctx.frame_id, ctx.pose_id)?;
        if p.depth_offsets.len() != pose.len() {
            return Err(Error::JointCountMismatch {
                expected: pose.len(),
                actual: p.depth_offsets.len(),
            });
        }
        Ok(p.clone())
    }
}

/// Prediction file layout, version 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictionFile {
    pub version: u32,
    pub frames: Vec<FramePredictions>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FramePredictions {
    pub frame_id: u64,
    pub poses: Vec<PosePrediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosePrediction {
    pub pose_id: u64,
    pub theta_radians: f64,
    pub depth_offsets: Vec<f64>,
}

pub fn parse_predictions(text: &str, origin: &str) -> Result<PredictionStore> {
    let file: PredictionFile = serde_json::from_str(text).map_err(|e| {
        Error::schema(
            format!("{origin}:{}:{}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    PredictionStore::from_file(file)
}

pub fn load_predictions(path: &Path) -> Result<PredictionStore> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text, &path.display().to_string())
}

/// How to build a predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PredictorSpec {
    Oracle,
    NoisyOracle {
        sigma_d: f64,
        sigma_theta: f64,
        seed: u64,
        #[serde(default)]
        theta_correlation: f64,
    },
    File {
        path: PathBuf,
    },
}

impl PredictorSpec {
    pub fn build(&self) -> Result<Box<dyn Predictor>> {
        Ok(match self {
            PredictorSpec::Oracle => Box::new(OraclePredictor),
            PredictorSpec::NoisyOracle {
                sigma_d,
                sigma_theta,
                seed,
                theta_correlation,
            } => Box::new(
                NoisyOraclePredictor::new(*sigma_d, *sigma_theta, *seed)?
                    .with_theta_correlation(*theta_correlation)?,
            ),
            PredictorSpec::File { path } => Box::new(load_predictions(path)?),
        })
    }
}
