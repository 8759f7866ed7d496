//! The four-row ablation over a noisy oracle, plus the same run without
//! noise and with a shared per-frame angle error.
//!
//! Run with `cargo run --release --example ablation_study [frames]`.

use scenelift::prelude::*;

fn main() -> Result<()> {
    let frames: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("frame count"))
        .unwrap_or(500);
    let skeleton = Skeleton::default_body();
    let config = DatasetConfig::new(
        frames,
        SceneSpec {
            seed: 2024,
            ..Default::default()
        },
        CameraConfig::default(),
        CameraSweep::Uniform {
            min_deg: 5.0,
            max_deg: 35.0,
        },
    );
    let dataset = Dataset::generate(config, skeleton.clone())?;

    let runs: [(&str, Box<dyn Predictor>); 3] = [
        ("oracle", Box::new(OraclePredictor)),
        ("noisy oracle, independent angle noise", Box::new(NoisyOraclePredictor::new(0.1, 0.05, 7)?)),
        (
            "noisy oracle, angle noise shared within a frame",
            Box::new(NoisyOraclePredictor::new(0.1, 0.05, 7)?.with_theta_correlation(1.0)?),
        ),
    ];
    for (label, predictor) in runs {
        let settings = RunSettings {
            predictor: predictor.as_ref(),
            skeleton: &skeleton,
            constants: Constants::default(),
            sign: CompensationSign::AsPrinted,
            rde_variant: RdeVariant::Vector,
        };
        let table = ablate(&dataset.frames, &settings)?;
        println!("== {label}\n{}", table.to_text());
    }
    Ok(())
}
