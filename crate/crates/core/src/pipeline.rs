//! Glue between the generator, a predictor, the composer and the metrics.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::composer::{reconstruct_with_sign, AblationMode, ReconstructionResult};
use crate::error::{Error, Result};
use crate::geometry::CompensationSign;
use crate::lifter::{LiftPrediction, PredictContext, Predictor};
use crate::metrics::{
    evaluate_frame, AggregateMetrics, FrameFailure, FrameMetrics, MetricReport, RdeVariant,
};
use crate::pose::{Constants, Scene3D};
use crate::skeleton::Skeleton;
use crate::synth::GroundTruthFrame;

/// Predictions for every pose of a frame, in input order.
pub fn predict_frame(frame: &GroundTruthFrame, predictor: &dyn Predictor) -> Result<Vec<LiftPrediction>> {
    frame
        .persons
        .iter()
        .map(|p| {
            let truth = p.truth();
            let ctx = PredictContext {
                frame_id: frame.frame_id,
                pose_id: p.pose_id,
                truth: Some(&truth),
            };
            predictor.predict(&p.pose_2d, &ctx)
        })
        .collect()
}

pub fn reconstruct_frame(
    frame: &GroundTruthFrame,
    predictor: &dyn Predictor,
    skeleton: &Skeleton,
    mode: AblationMode,
    constants: &Constants,
    sign: CompensationSign,
) -> Result<ReconstructionResult> {
    let preds = predict_frame(frame, predictor)?;
    reconstruct_with_sign(&frame.poses_2d(), &preds, skeleton, mode, constants, sign)
}

/// Ground truth in the reconstruction's output order.
pub fn matching_ground_truth(
    frame: &GroundTruthFrame,
    result: &ReconstructionResult,
    skeleton: &Skeleton,
) -> Result<Scene3D> {
    Ok(frame.world_scene(skeleton)?.reordered(&result.order))
}

pub fn evaluate_reconstruction(
    frame: &GroundTruthFrame,
    result: &ReconstructionResult,
    skeleton: &Skeleton,
    variant: RdeVariant,
) -> Result<FrameMetrics> {
    let gt = matching_ground_truth(frame, result, skeleton)?;
    evaluate_frame(frame.frame_id, &result.scene, &gt, frame.mm_per_unit, variant)
}

/// Everything needed to run one configuration over many frames.
#[derive(Clone, Copy)]
pub struct RunSettings<'a> {
    pub predictor: &'a dyn Predictor,
    pub skeleton: &'a Skeleton,
    pub constants: Constants,
    pub sign: CompensationSign,
    pub rde_variant: RdeVariant,
}

/// Per-frame outcome of a batch run. Only [`Error::DegenerateScaling`] is
/// tolerated per frame (noisy predictions can put a root below the floor);
/// any other error aborts the batch.
fn tolerate(frame_id: u64, r: Result<FrameMetrics>) -> Result<std::result::Result<FrameMetrics, FrameFailure>> {
    match r {
        Ok(m) => Ok(Ok(m)),
        Err(e @ Error::DegenerateScaling { .. }) => Ok(Err(FrameFailure {
            frame_id,
            error: e.to_string(),
        })),
        Err(e) => Err(e),
    }
}

/// Reconstructs and scores every frame; frames are processed in parallel
/// and reported in input order.
pub fn evaluate_mode(
    frames: &[GroundTruthFrame],
    mode: AblationMode,
    settings: &RunSettings<'_>,
) -> Result<MetricReport> {
    let outcomes = frames
        .par_iter()
        .map(|fr| {
            let r = reconstruct_frame(
                fr,
                settings.predictor,
                settings.skeleton,
                mode,
                &settings.constants,
                settings.sign,
            )
            .and_then(|result| {
                evaluate_reconstruction(fr, &result, settings.skeleton, settings.rde_variant)
            });
            tolerate(fr.frame_id, r)
        })
        .collect::<Result<Vec<_>>>()?;
    let (ok, failed): (Vec<_>, Vec<_>) = outcomes.into_iter().partition(|o| o.is_ok());
    let ok = ok.into_iter().map(|o| o.unwrap()).collect();
    let failed = failed.into_iter().map(|o| o.unwrap_err()).collect();
    Ok(MetricReport::new(mode, settings.rde_variant, ok).with_failures(failed))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub mode: AblationMode,
    /// Mean over the frames every mode reconstructed.
    pub aggregate: AggregateMetrics,
    pub failed_frames: usize,
}

/// The four standard ablation rows, compared on a common frame set.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationTable {
    pub total_frames: usize,
    pub common_frames: Vec<u64>,
    pub rows: Vec<AblationRow>,
    pub reports: Vec<MetricReport>,
}

pub const ABLATION_CSV_COLUMNS: [&str; 11] = [
    "mode",
    "elevation_compensation",
    "rotation_compensation",
    "contact_heuristic",
    "frames",
    "failed_frames",
    "pa_mpjpe_mm",
    "se_percent",
    "se_abs_percent",
    "mte_mm",
    "rde_mm",
];

pub const PLOT_CSV_COLUMNS: [&str; 4] = ["mode", "frame_id", "metric", "value"];

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

impl AblationTable {
    pub fn row(&self, mode: AblationMode) -> Option<&AblationRow> {
        self.rows.iter().find(|r| r.mode == mode)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(ABLATION_CSV_COLUMNS).expect("in-memory write");
        for r in &self.rows {
            let a = &r.aggregate;
            let mut rec = vec![
                r.mode.name(),
                flag(r.mode.elevation_compensation).into(),
                flag(r.mode.rotation_compensation).into(),
                flag(r.mode.contact_heuristic).into(),
                a.frames.to_string(),
                r.failed_frames.to_string(),
            ];
            rec.extend([a.pa_mpjpe_mm, a.se_percent, a.se_abs_percent, a.te_mm, a.rde_mm].map(|v| v.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }

    /// Fixed-width table in the usual ablation layout.
    pub fn to_text(&self) -> String {
        let yes = |b: bool| if b { "yes" } else { "no" };
        let mut out = format!(
            "{:<10} {:<10} {:<10} {:>12} {:>9} {:>10} {:>10} {:>7}\n",
            "elevation", "rotation", "theta1=2", "PA-MPJPE", "SE", "MTE", "RDE", "failed"
        );
        for r in &self.rows {
            let a = &r.aggregate;
            out.push_str(&format!(
                "{:<10} {:<10} {:<10} {:>12.1} {:>8.1}% {:>10.1} {:>10.1} {:>7}\n",
                yes(r.mode.elevation_compensation),
                yes(r.mode.rotation_compensation),
                yes(r.mode.contact_heuristic),
                a.pa_mpjpe_mm,
                a.se_abs_percent,
                a.te_mm,
                a.rde_mm,
                r.failed_frames
            ));
        }
        out.push_str(&format!(
            "{} of {} frames reconstructed by every mode; distances in mm, SE is the mean absolute scale error\n",
            self.common_frames.len(),
            self.total_frames
        ));
        out
    }

    /// Long format: one `(mode, frame, metric, value)` row per measurement.
    pub fn plot_data_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(PLOT_CSV_COLUMNS).expect("in-memory write");
        for rep in &self.reports {
            let mode = rep.mode.name();
            for f in &rep.frames {
                for (metric, value) in [
                    ("pa_mpjpe_mm", f.pa_mpjpe_mm),
                    ("se_percent", f.se_percent),
                    ("se_abs_percent", f.se_abs_percent),
                    ("mte_mm", f.te_mm),
                    ("rde_mm", f.rde_mm),
                ] {
                    w.write_record([mode.as_str(), &f.frame_id.to_string(), metric, &value.to_string()])
                        .expect("in-memory write");
                }
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }
}

/// Runs the four standard modes over the same frames and predictor.
pub fn ablate(frames: &[GroundTruthFrame], settings: &RunSettings<'_>) -> Result<AblationTable> {
    let reports = AblationMode::table_rows()
        .into_iter()
        .map(|mode| evaluate_mode(frames, mode, settings))
        .collect::<Result<Vec<_>>>()?;
    let failed: BTreeSet<u64> = reports
        .iter()
        .flat_map(|r| r.failed_frames.iter().map(|f| f.frame_id))
        .collect();
    let common_frames: Vec<u64> = frames
        .iter()
        .map(|f| f.frame_id)
        .filter(|id| !failed.contains(id))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let rows = reports
        .iter()
        .map(|r| AblationRow {
            mode: r.mode,
            aggregate: r.aggregate_over(&common_frames),
            failed_frames: r.failed_frames.len(),
        })
        .collect();
    Ok(AblationTable {
        total_frames: frames.len(),
        common_frames,
        rows,
        reports,
    })
}
