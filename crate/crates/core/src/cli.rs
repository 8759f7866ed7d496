//! Command implementations behind the `scenelift` binary.
//!
//! Every option can come from a flag or from a JSON config file given with
//! `--config`; flags win. Outputs contain no timestamps or absolute paths
//! that the flags did not supply, so reruns are byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::composer::{AblationMode, ReconstructionResult};
use crate::error::{Error, Result};
use crate::geometry::CompensationSign;
use crate::io::{read_json, write_json, write_text};
use crate::lifter::{Predictor, PredictorSpec};
use crate::metrics::{evaluate_frame, FrameFailure, MetricReport, RdeVariant};
use crate::pipeline::{ablate, reconstruct_frame, RunSettings};
use crate::pose::{Constants, Pose3D, Scene3D};
use crate::skeleton::Skeleton;
use crate::synth::{
    generate_dataset, load_dataset, CameraConfig, CameraSweep, Dataset, DatasetConfig, PoseLibrary,
    SceneSpec,
};

pub const RECONSTRUCTION_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "scenelift", version, about = "Multi-person 3D scene reconstruction from 2D poses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic two-person dataset with exact ground truth.
    Generate(RunConfig),
    /// Reconstruct every frame of a dataset into a 3D scene.
    Reconstruct(RunConfig),
    /// Score reconstructions against ground truth.
    Evaluate(RunConfig),
    /// Run the four standard ablation modes and tabulate them.
    Ablate(RunConfig),
}

fn parse_kebab<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<AblationMode, String> {
    AblationMode::from_str(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictorKind {
    Oracle,
    NoisyOracle,
    File,
}

/// Options shared by all commands. Each command rejects options it does
/// not use.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct RunConfig {
    /// JSON file with any of these options; flags override it.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Dataset directory.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reconstruction directory to evaluate (defaults to --out).
    #[arg(long)]
    pub reconstructions: Option<PathBuf>,
    /// Number of frames to generate.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Scene seed for `generate`, noise seed for the noisy oracle.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixed camera elevations in degrees, assigned round-robin.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub elevations: Option<Vec<f64>>,
    /// Uniform elevation range `lo,hi` in degrees.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub elevation_range: Option<Vec<f64>>,
    /// Extra depth of the second person, range `lo,hi` in scene units.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub depth_separation: Option<Vec<f64>>,
    /// standing | crouching | reaching | leaning | mixed
    #[arg(long, value_parser = parse_kebab::<PoseLibrary>)]
    pub pose_library: Option<PoseLibrary>,
    /// naive | heuristic | rotation-heuristic | full | custom-ERH
    #[arg(long, value_parser = parse_mode)]
    #[serde(default, with = "mode_serde")]
    pub mode: Option<AblationMode>,
    /// oracle | noisy-oracle | file
    #[arg(long, value_parser = parse_kebab::<PredictorKind>)]
    pub predictor: Option<PredictorKind>,
    /// Depth-offset noise of the noisy oracle, scene units.
    #[arg(long)]
    pub sigma_d: Option<f64>,
    /// Elevation-angle noise of the noisy oracle, radians.
    #[arg(long)]
    pub sigma_theta: Option<f64>,
    /// Share of the angle noise common to all poses of a frame, in [0, 1].
    #[arg(long)]
    pub theta_correlation: Option<f64>,
    /// Prediction file for `--predictor file`.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    /// Depth constant c (defaults to the dataset's).
    #[arg(long)]
    pub c: Option<f64>,
    /// Root pixel distance below which the contact heuristic fires.
    #[arg(long)]
    pub contact_threshold_px: Option<f64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
    /// vector | magnitude
    #[arg(long, value_parser = parse_kebab::<RdeVariant>)]
    pub rde_variant: Option<RdeVariant>,
    /// Apply the compensation rotation with the opposite sign (negative control).
    #[arg(long)]
    #[serde(default)]
    pub opposite_sign: bool,
    /// Also write a long-format CSV for plotting.
    #[arg(long)]
    #[serde(default)]
    pub emit_plot_data: bool,
}

mod mode_serde {
    use super::*;

    pub fn serialize<S: serde::Serializer>(m: &Option<AblationMode>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match m {
            Some(m) => s.serialize_some(&m.name()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<AblationMode>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| AblationMode::from_str(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

impl RunConfig {
    /// Folds in the `--config` file, if any; flags already set win.
    pub fn resolve(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file: RunConfig = read_json(&path).map_err(|e| match e {
            Error::SchemaViolation { .. } => Error::InvalidSpec(format!("run config: {e}")),
            e => e,
        })?;
        merge_fields!(self, file; dataset, out, reconstructions, frames, seed, elevations,
            elevation_range, depth_separation, pose_library, mode, predictor, sigma_d,
            sigma_theta, theta_correlation, predictions, c, contact_threshold_px, workers,
            rde_variant);
        self.opposite_sign |= file.opposite_sign;
        self.emit_plot_data |= file.emit_plot_data;
        Ok(self)
    }

    fn set_options(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => { $( if self.$f.is_some() { out.push(stringify!($f)); } )* };
        }
        check!(dataset, out, reconstructions, frames, seed, elevations, elevation_range,
            depth_separation, pose_library, mode, predictor, sigma_d, sigma_theta,
            theta_correlation, predictions, c, contact_threshold_px, workers, rde_variant);
        if self.opposite_sign {
            out.push("opposite_sign");
        }
        if self.emit_plot_data {
            out.push("emit_plot_data");
        }
        out
    }

    fn only(&self, command: &str, allowed: &[&str]) -> Result<()> {
        for name in self.set_options() {
            if name != "workers" && !allowed.contains(&name) {
                return Err(Error::InvalidSpec(format!(
                    "`{command}` does not accept --{}",
                    name.replace('_', "-")
                )));
            }
        }
        Ok(())
    }

    fn require<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
        v.as_ref()
            .ok_or_else(|| Error::InvalidSpec(format!("missing required option --{flag}")))
    }

    fn range(v: &Option<Vec<f64>>, flag: &str) -> Result<Option<[f64; 2]>> {
        match v.as_deref() {
            None => Ok(None),
            Some([lo, hi]) => Ok(Some([*lo, *hi])),
            Some(other) => Err(Error::InvalidSpec(format!(
                "--{flag} expects `lo,hi`, got {} values",
                other.len()
            ))),
        }
    }

    fn constants(&self, dataset: &Dataset) -> Result<Constants> {
        let defaults = Constants::default();
        Constants::new(
            self.c.unwrap_or(dataset.config.camera.c),
            self.contact_threshold_px.unwrap_or(defaults.contact_threshold_px),
        )
    }

    fn predictor_spec(&self, default: PredictorKind) -> Result<PredictorSpec> {
        let kind = self.predictor.unwrap_or(default);
        if kind != PredictorKind::NoisyOracle
            && (self.sigma_d.is_some() || self.sigma_theta.is_some() || self.theta_correlation.is_some())
        {
            return Err(Error::InvalidSpec(
                "noise options need --predictor noisy-oracle".into(),
            ));
        }
        if kind != PredictorKind::File && self.predictions.is_some() {
            return Err(Error::InvalidSpec("--predictions needs --predictor file".into()));
        }
        Ok(match kind {
            PredictorKind::Oracle => PredictorSpec::Oracle,
            PredictorKind::NoisyOracle => PredictorSpec::NoisyOracle {
                sigma_d: self.sigma_d.unwrap_or(0.1),
                sigma_theta: self.sigma_theta.unwrap_or(0.05),
                seed: self.seed.unwrap_or(0),
                theta_correlation: self.theta_correlation.unwrap_or(0.0),
            },
            PredictorKind::File => PredictorSpec::File {
                path: Self::require(&self.predictions, "predictions")?.clone(),
            },
        })
    }

    fn sign(&self) -> CompensationSign {
        if self.opposite_sign {
            CompensationSign::Opposite
        } else {
            CompensationSign::AsPrinted
        }
    }
}

/// Parses, resolves the config file and runs the command on a worker pool
/// of the requested size. Returns the text to print.
pub fn run(cli: Cli) -> Result<String> {
    let (name, cfg) = match cli.command {
        Command::Generate(c) => ("generate", c),
        Command::Reconstruct(c) => ("reconstruct", c),
        Command::Evaluate(c) => ("evaluate", c),
        Command::Ablate(c) => ("ablate", c),
    };
    let cfg = cfg.resolve()?;
    let workers = match cfg.workers {
        Some(0) => return Err(Error::InvalidSpec("--workers must be >= 1".into())),
        Some(n) => n,
        None => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidSpec(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match name {
        "generate" => cmd_generate(&cfg),
        "reconstruct" => cmd_reconstruct(&cfg),
        "evaluate" => cmd_evaluate(&cfg),
        _ => cmd_ablate(&cfg),
    })
}

pub fn cmd_generate(cfg: &RunConfig) -> Result<String> {
    cfg.only(
        "generate",
        &["out", "frames", "seed", "elevations", "elevation_range", "depth_separation", "pose_library", "c"],
    )?;
    let out = RunConfig::require(&cfg.out, "out")?;
    let frames = *RunConfig::require(&cfg.frames, "frames")?;
    if frames == 0 {
        return Err(Error::InvalidSpec(
            "--frames must be >= 1 (usage: scenelift generate --out DIR --frames N [--seed S] [--elevations a,b,...])"
                .into(),
        ));
    }
    let mut scene = SceneSpec {
        seed: cfg.seed.unwrap_or(0),
        ..Default::default()
    };
    if let Some(r) = RunConfig::range(&cfg.depth_separation, "depth-separation")? {
        scene.depth_separation = r;
    }
    if let Some(lib) = cfg.pose_library {
        scene.pose_library = lib;
    }
    let mut camera = CameraConfig::default();
    if let Some(c) = cfg.c {
        camera.c = c;
    }
    let sweep = match (&cfg.elevations, RunConfig::range(&cfg.elevation_range, "elevation-range")?) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidSpec(
                "--elevations and --elevation-range are mutually exclusive".into(),
            ))
        }
        (Some(list), None) => CameraSweep::Fixed {
            elevations_deg: list.clone(),
        },
        (None, Some([lo, hi])) => CameraSweep::Uniform {
            min_deg: lo,
            max_deg: hi,
        },
        (None, None) => CameraSweep::default(),
    };
    let config = DatasetConfig::new(frames, scene, camera, sweep);
    let ds = generate_dataset(out, config, Skeleton::default_body())?;

    let mut s = format!("wrote {} frames to {}\n", ds.frames.len(), out.display());
    let snapped = ds.frames.iter().filter(|f| f.contact_snapped).count();
    let _ = writeln!(s, "pelvises levelled by the contact rule: {snapped}");
    for (elev, ids) in ds.frames_by_elevation() {
        let _ = writeln!(s, "  elevation {elev:>6} deg: {} frames", ids.len());
    }
    Ok(s)
}

/// One reconstructed frame as written to `scenes/NNNN.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: u32,
    pub frame_id: u64,
    pub mode: String,
    /// Input pose id of each output pose.
    pub pose_ids: Vec<u64>,
    pub poses: Vec<Pose3D>,
    pub diagnostics: Diagnostics,
}

/// The transforms applied to each output pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    pub compensation_sign: String,
    pub predicted_thetas: Vec<f64>,
    pub rotation_angles: Vec<f64>,
    pub heuristic_fired: Vec<bool>,
    pub vertical_offsets: Vec<f64>,
    pub horizontal_offsets: Vec<f64>,
    pub root_heights: Vec<f64>,
    pub scale_factors: Vec<f64>,
}

impl Diagnostics {
    fn from_result(r: &ReconstructionResult) -> Self {
        Self {
            compensation_sign: match r.sign {
                CompensationSign::AsPrinted => "as-printed".into(),
                CompensationSign::Opposite => "opposite".into(),
            },
            predicted_thetas: r.predicted_thetas.clone(),
            rotation_angles: r.rotation_angles.clone(),
            heuristic_fired: r.heuristic_fired.clone(),
            vertical_offsets: r.vertical_offsets.clone(),
            horizontal_offsets: r.horizontal_offsets.clone(),
            root_heights: r.root_heights.clone(),
            scale_factors: r.scale_factors.clone(),
        }
    }
}

/// `reconstruction.json`: what was run and which frames exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructionManifest {
    pub version: u32,
    pub mode: String,
    pub predictor: PredictorSpec,
    pub c: f64,
    pub contact_threshold_px: f64,
    pub frames: Vec<u64>,
    pub failed_frames: Vec<FrameFailure>,
}

fn scene_path(dir: &Path, frame_id: u64) -> PathBuf {
    dir.join("scenes").join(format!("{frame_id:04}.json"))
}

pub fn cmd_reconstruct(cfg: &RunConfig) -> Result<String> {
    cfg.only(
        "reconstruct",
        &["dataset", "out", "mode", "predictor", "sigma_d", "sigma_theta", "theta_correlation",
          "predictions", "seed", "c", "contact_threshold_px", "opposite_sign"],
    )?;
    let dataset = load_dataset(RunConfig::require(&cfg.dataset, "dataset")?)?;
    let out = RunConfig::require(&cfg.out, "out")?;
    let mode = cfg.mode.unwrap_or(AblationMode::FULL);
    let spec = cfg.predictor_spec(PredictorKind::Oracle)?;
    let predictor = spec.build()?;
    let constants = cfg.constants(&dataset)?;
    let sign = cfg.sign();
    let sk = &dataset.skeleton;

    let outcomes = dataset
        .frames
        .par_iter()
        .map(|fr| match reconstruct_frame(fr, predictor.as_ref(), sk, mode, &constants, sign) {
            Ok(r) => Ok(Ok((fr, r))),
            Err(e @ Error::DegenerateScaling { .. }) => Ok(Err(FrameFailure {
                frame_id: fr.frame_id,
                error: e.to_string(),
            })),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;

    let mut frames = Vec::new();
    let mut failed = Vec::new();
    for o in &outcomes {
        match o {
            Ok((fr, r)) => {
                let file = SceneFile {
                    version: RECONSTRUCTION_SCHEMA_VERSION,
                    frame_id: fr.frame_id,
                    mode: mode.name(),
                    pose_ids: r.order.iter().map(|&i| fr.persons[i].pose_id).collect(),
                    poses: r.scene.poses().to_vec(),
                    diagnostics: Diagnostics::from_result(r),
                };
                write_json(&scene_path(out, fr.frame_id), &file)?;
                frames.push(fr.frame_id);
            }
            Err(f) => failed.push(f.clone()),
        }
    }
    let manifest = ReconstructionManifest {
        version: RECONSTRUCTION_SCHEMA_VERSION,
        mode: mode.name(),
        predictor: spec,
        c: constants.c,
        contact_threshold_px: constants.contact_threshold_px,
        frames: frames.clone(),
        failed_frames: failed.clone(),
    };
    write_json(&out.join("reconstruction.json"), &manifest)?;
    let mut s = format!(
        "reconstructed {} of {} frames in mode {} into {}\n",
        frames.len(),
        dataset.frames.len(),
        mode,
        out.display()
    );
    for f in &failed {
        let _ = writeln!(s, "  frame {}: {}", f.frame_id, f.error);
    }
    Ok(s)
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<String> {
    cfg.only("evaluate", &["dataset", "reconstructions", "out", "rde_variant"])?;
    let dataset = load_dataset(RunConfig::require(&cfg.dataset, "dataset")?)?;
    let recon_dir = match (&cfg.reconstructions, &cfg.out) {
        (Some(r), _) => r.clone(),
        (None, Some(o)) => o.clone(),
        (None, None) => {
            return Err(Error::InvalidSpec(
                "missing required option --reconstructions (or --out)".into(),
            ))
        }
    };
    let out = cfg.out.clone().unwrap_or_else(|| recon_dir.clone());
    let variant = cfg.rde_variant.unwrap_or_default();
    let manifest: ReconstructionManifest = read_json(&recon_dir.join("reconstruction.json"))?;
    let mode = AblationMode::from_str(&manifest.mode)
        .map_err(|e| Error::schema("reconstruction.json:mode", e.to_string()))?;

    let mut claimed: Vec<u64> = manifest
        .frames
        .iter()
        .copied()
        .chain(manifest.failed_frames.iter().map(|f| f.frame_id))
        .collect();
    claimed.sort_unstable();
    let expected: Vec<u64> = dataset.frames.iter().map(|f| f.frame_id).collect();
    if claimed != expected {
        return Err(Error::ScenePairMismatch(format!(
            "reconstructions cover {} frames, dataset has {}",
            claimed.len(),
            expected.len()
        )));
    }
    let by_id: BTreeMap<u64, usize> = dataset
        .frames
        .iter()
        .enumerate()
        .map(|(i, f)| (f.frame_id, i))
        .collect();

    let metrics = manifest
        .frames
        .par_iter()
        .map(|&id| {
            let fr = &dataset.frames[by_id[&id]];
            let file: SceneFile = read_json(&scene_path(&recon_dir, id))?;
            if file.frame_id != id {
                return Err(Error::ScenePairMismatch(format!(
                    "scene file for frame {id} claims frame {}",
                    file.frame_id
                )));
            }
            let order = file
                .pose_ids
                .iter()
                .map(|pid| {
                    fr.persons.iter().position(|p| p.pose_id == *pid).ok_or_else(|| {
                        Error::ScenePairMismatch(format!("frame {id} has no pose {pid}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if order.len() != fr.persons.len() {
                return Err(Error::ScenePairMismatch(format!(
                    "frame {id}: {} reconstructed poses, {} in ground truth",
                    order.len(),
                    fr.persons.len()
                )));
            }
            let pred = Scene3D::new(file.poses, dataset.skeleton.root())?;
            let gt = fr.world_scene(&dataset.skeleton)?.reordered(&order);
            evaluate_frame(id, &pred, &gt, fr.mm_per_unit, variant)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = MetricReport::new(mode, variant, metrics).with_failures(manifest.failed_frames);
    write_json(&out.join("report.json"), &report)?;
    write_text(&out.join("report.csv"), &report.to_csv())?;

    let a = &report.aggregate;
    Ok(format!(
        "evaluated {} frames ({} failed to reconstruct), mode {}\n\
         PA-MPJPE {:.6} mm  SE {:.6}% (|SE| {:.6}%)  TE {:.6} mm  RDE {:.6} mm\n",
        a.frames,
        report.failed_frames.len(),
        mode,
        a.pa_mpjpe_mm,
        a.se_percent,
        a.se_abs_percent,
        a.te_mm,
        a.rde_mm
    ))
}

pub fn cmd_ablate(cfg: &RunConfig) -> Result<String> {
    cfg.only(
        "ablate",
        &["dataset", "out", "predictor", "sigma_d", "sigma_theta", "theta_correlation",
          "predictions", "seed", "c", "contact_threshold_px", "rde_variant", "opposite_sign",
          "emit_plot_data"],
    )?;
    let dataset = load_dataset(RunConfig::require(&cfg.dataset, "dataset")?)?;
    let out = RunConfig::require(&cfg.out, "out")?;
    let spec = cfg.predictor_spec(PredictorKind::NoisyOracle)?;
    let predictor: Box<dyn Predictor> = spec.build()?;
    let settings = RunSettings {
        predictor: predictor.as_ref(),
        skeleton: &dataset.skeleton,
        constants: cfg.constants(&dataset)?,
        sign: cfg.sign(),
        rde_variant: cfg.rde_variant.unwrap_or_default(),
    };
    let table = ablate(&dataset.frames, &settings)?;
    write_text(&out.join("ablation.csv"), &table.to_csv())?;
    let text = table.to_text();
    write_text(&out.join("ablation.txt"), &text)?;
    for rep in &table.reports {
        write_json(&out.join("reports").join(format!("{}.json", rep.mode.name())), rep)?;
    }
    if cfg.emit_plot_data {
        write_text(&out.join("plot_data.csv"), &table.plot_data_csv())?;
    }
    Ok(text)
}
