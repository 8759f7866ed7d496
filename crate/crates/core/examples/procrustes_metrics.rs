//! Similarity alignment of a whole scene and the four scene metrics.
//!
//! Run with `cargo run --example procrustes_metrics`.

use nalgebra::{Rotation3, Vector3};
use scenelift::prelude::*;

fn main() -> Result<()> {
    let skeleton = Skeleton::default_body();
    let frame = generate_frame(&SceneSpec::default(), &CameraConfig::default(), &skeleton, 5)?;
    let gt = frame.world_scene(&skeleton)?;

    // A prediction that differs only by a similarity transform aligns perfectly.
    let r = Rotation3::from_euler_angles(0.3, -1.1, 0.4);
    let t = Vector3::new(4.0, -2.0, 7.5);
    let moved = gt.map_joints(|p| 1.7 * (r * p) + t);
    let (sim, _) = align_scene(&moved, &gt)?;
    println!("recovered scale {:.12} (expected {:.12})", sim.scale, 1.0 / 1.7);
    println!("PA-MPJPE after alignment {:.2e}", pa_mpjpe(&moved, &gt)?);

    // Pull the second person 0.2 units further from the first: the error now
    // shows up in the translation and root displacement metrics.
    let mut poses = gt.poses().to_vec();
    let shift = Vector3::new(0.2, 0.0, 0.0);
    poses[1] = poses[1].translated(&shift);
    let pred = Scene3D::new(poses, skeleton.root())?;
    let m = evaluate_frame(frame.frame_id, &pred, &gt, frame.mm_per_unit, RdeVariant::Vector)?;
    println!("mm per unit {:.1}", frame.mm_per_unit);
    println!(
        "PA-MPJPE {:.1} mm  SE {:+.2}% ({:+.1} mm)  TE {:.1} mm  RDE {:.1} mm",
        m.pa_mpjpe_mm, m.se_percent, m.se_mm, m.te_mm, m.rde_mm
    );
    let mag = evaluate_frame(frame.frame_id, &pred, &gt, frame.mm_per_unit, RdeVariant::Magnitude)?;
    println!("RDE (magnitude variant) {:.1} mm", mag.rde_mm);
    Ok(())
}
