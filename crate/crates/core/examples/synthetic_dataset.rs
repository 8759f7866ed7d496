//! Write a stratified synthetic dataset to disk and load it back.
//!
//! Run with `cargo run --example synthetic_dataset [dir]`.

use std::path::PathBuf;

use scenelift::prelude::*;
use scenelift::synth::{generate_dataset, load_dataset};

fn main() -> Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("scenelift-example-dataset"));
    let config = DatasetConfig::new(
        12,
        SceneSpec {
            seed: 7,
            depth_separation: [0.0, 1.5],
            ..Default::default()
        },
        CameraConfig::default(),
        CameraSweep::Fixed {
            elevations_deg: vec![0.0, 15.0, 30.0],
        },
    );
    for s in &config.strata {
        println!("stratum {:>5.1} deg: {} frames", s.elevation_deg, s.frames);
    }
    let written = generate_dataset(&dir, config, Skeleton::default_body())?;
    let loaded = load_dataset(&dir)?;
    assert_eq!(written.frames, loaded.frames);
    println!("wrote and re-validated {} frames in {}", loaded.frames.len(), dir.display());

    for fr in loaded.frames.iter().take(4) {
        let h = fr.root_heights(&loaded.skeleton);
        println!(
            "frame {}: camera {:+.0} deg at height {:+.2}, pelvis heights {:.3} / {:.3}, levelled: {}",
            fr.frame_id, fr.camera.elevation_deg, fr.camera_height, h[0], h[1], fr.contact_snapped
        );
    }
    Ok(())
}
