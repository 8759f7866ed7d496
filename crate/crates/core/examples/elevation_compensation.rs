//! Undo the camera tilt of a pose and recover the pelvis height difference
//! between two people from their elevation angles alone.
//!
//! Run with `cargo run --example elevation_compensation`.

use scenelift::prelude::*;

fn main() -> Result<()> {
    let skeleton = Skeleton::default_body();
    let c = CameraConfig::default().c;
    let root = skeleton.root();

    for elevation in [-20.0, 0.0, 15.0, 35.0] {
        let camera = CameraConfig::default().with_elevation(elevation);
        let frame = generate_frame(&SceneSpec::default(), &camera, &skeleton, 3)?;
        let (a, b) = (&frame.persons[0], &frame.persons[1]);

        let dh = elevation_offset(a.theta, b.theta, c);
        let truth = b.world.joint(root).y - a.world.joint(root).y;
        println!(
            "camera {elevation:+5.1} deg: theta1={:+.2} deg theta2={:+.2} deg  dh={dh:+.6}  true={truth:+.6}",
            a.theta.radians().to_degrees(),
            b.theta.radians().to_degrees()
        );

        // Rotating the camera-frame pose about its root restores world orientation;
        // the opposite sign doubles the tilt instead.
        for sign in [CompensationSign::AsPrinted, CompensationSign::Opposite] {
            let r = scenelift::geometry::rotation_about_x_signed(a.theta, sign);
            let cam_root = a.camera_frame.joint(root);
            let world_root = a.world.joint(root);
            let err = a
                .camera_frame
                .coords
                .iter()
                .zip(&a.world.coords)
                .map(|(p, w)| (r.apply(&(p - cam_root)) - (w - world_root)).norm())
                .fold(0.0, f64::max);
            println!("    {sign:?} rotation: worst joint error {err:.2e}");
        }
    }
    Ok(())
}
