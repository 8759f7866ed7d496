//! Normalize one detected pose and lift it to 3D with a hand-made prediction.
//!
//! Run with `cargo run --example normalize_and_lift`.

use nalgebra::Vector2;
use scenelift::pose::denormalize;
use scenelift::prelude::*;

fn main() -> Result<()> {
    let skeleton = Skeleton::default_body();
    let c = Constants::default().c;

    // A stick figure in pixels (v grows downward); the pelvis is omitted
    // and recovered as the hip midpoint.
    let mut raw = vec![None; skeleton.len()];
    let mut put = |name: &str, u: f64, v: f64| {
        raw[skeleton.index_of(name).expect("joint").0] = Some(Vector2::new(u, v));
    };
    put("l_hip", 520.0, 600.0);
    put("r_hip", 480.0, 600.0);
    put("l_knee", 522.0, 690.0);
    put("r_knee", 478.0, 690.0);
    put("l_foot", 524.0, 780.0);
    put("r_foot", 476.0, 780.0);
    put("thorax", 500.0, 540.0);
    put("neck", 500.0, 515.0);
    put("head", 500.0, 500.0);
    put("l_shoulder", 530.0, 525.0);
    put("r_shoulder", 470.0, 525.0);
    put("l_elbow", 540.0, 565.0);
    put("r_elbow", 460.0, 565.0);
    put("l_wrist", 545.0, 600.0);
    put("r_wrist", 455.0, 600.0);
    put("l_hand", 546.0, 615.0);
    put("r_hand", 454.0, 615.0);

    let pose = normalize_pose(&raw, &skeleton, c)?;
    println!("root pixel     {:?}", pose.root_pixel());
    println!("norm scale     {:.1} px (c * head-to-root distance)", pose.norm_scale());
    println!("head, normalized {:?}", pose.norm_coords()[skeleton.head().0]);

    // Pixels survive the round trip.
    let back = denormalize(&pose);
    let worst = back
        .iter()
        .zip(pose.pixel_coords())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("denormalize residual {worst:.2e} px");

    // A lifter would predict these; here the feet lean slightly toward the camera.
    let offsets: Vec<f64> = skeleton
        .names()
        .iter()
        .map(|n| if n.ends_with("foot") { -0.2 } else { 0.0 })
        .collect();
    let pred = LiftPrediction::new(offsets, ElevationAngle::from_degrees(12.0)?);
    let lifted = lift_pose(&pose, &pred, c)?;
    for name in ["pelvis", "head", "l_foot"] {
        let p = lifted.joint(skeleton.index_of(name).expect("joint"));
        let (x, y) = project_keypoint(&p)?;
        println!("{name:>7}: X={:+.3} Y={:+.3} Z={:.3} -> projects to ({x:+.4}, {y:+.4})", p.x, p.y, p.z);
    }
    Ok(())
}
