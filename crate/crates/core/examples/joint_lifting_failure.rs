//! Why poses are lifted one at a time: lifting both people as a single
//! skeleton around a shared root distorts the scene.
//!
//! Run with `cargo run --example joint_lifting_failure`.

use scenelift::composer::reconstruct_joint_lifting;
use scenelift::pipeline::{matching_ground_truth, predict_frame};
use scenelift::prelude::*;

fn main() -> Result<()> {
    let skeleton = Skeleton::default_body();
    let constants = Constants::default();
    println!("{:>6} {:>22} {:>22}", "frame", "joint lifting (mm)", "independent (mm)");
    for id in 0..8 {
        let camera = CameraConfig::default().with_elevation(20.0);
        let frame = generate_frame(&SceneSpec::default(), &camera, &skeleton, id)?;
        let preds = predict_frame(&frame, &OraclePredictor)?;
        let joint = reconstruct_joint_lifting(&frame.poses_2d(), &preds, &skeleton, constants.c)?;
        let ours = reconstruct(&frame.poses_2d(), &preds, &skeleton, AblationMode::FULL, &constants)?;
        let gt = matching_ground_truth(&frame, &ours, &skeleton)?;
        println!(
            "{id:>6} {:>22.1} {:>22.1}",
            pa_mpjpe(&joint, &gt)? * frame.mm_per_unit,
            pa_mpjpe(&ours.scene, &gt)? * frame.mm_per_unit
        );
    }
    Ok(())
}
