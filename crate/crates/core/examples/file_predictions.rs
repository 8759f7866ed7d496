//! Predictions from an external lifter: save them in the JSON exchange
//! format, load them back and reconstruct from the file.
//!
//! Run with `cargo run --example file_predictions`.

use scenelift::lifter::parse_predictions;
use scenelift::pipeline::predict_frame;
use scenelift::prelude::*;

fn main() -> Result<()> {
    let skeleton = Skeleton::default_body();
    let frames: Vec<GroundTruthFrame> = (0..3)
        .map(|i| generate_frame(&SceneSpec::default(), &CameraConfig::default(), &skeleton, i))
        .collect::<Result<_>>()?;

    // Stand-in for an external network: a noisy oracle.
    let lifter = NoisyOraclePredictor::new(0.02, 0.01, 1)?;
    let mut store = PredictionStore::new();
    for fr in &frames {
        for (person, pred) in fr.persons.iter().zip(predict_frame(fr, &lifter)?) {
            store.insert(fr.frame_id, person.pose_id, pred)?;
        }
    }
    let json = serde_json::to_string_pretty(&store.to_file()).expect("serializable");
    println!("{}", &json[..json.find("depth_offsets").unwrap_or(json.len())]);

    let loaded = parse_predictions(&json, "in-memory")?;
    for fr in &frames {
        let r = reconstruct_frame(fr, &loaded, &skeleton, AblationMode::FULL, &Constants::default(), CompensationSign::AsPrinted)?;
        let m = evaluate_reconstruction(fr, &r, &skeleton, RdeVariant::Vector)?;
        println!("frame {}: PA-MPJPE {:.1} mm", fr.frame_id, m.pa_mpjpe_mm);
    }

    // A malformed file names the offending location.
    let bad = json.replacen("\"theta_radians\"", "\"theta\"", 1);
    println!("malformed file: {}", parse_predictions(&bad, "bad.json").unwrap_err());
    Ok(())
}
