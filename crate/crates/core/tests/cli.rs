use std::path::Path;
use std::process::{Command, Output};

use scenelift::metrics::REPORT_CSV_COLUMNS;
use scenelift::pipeline::{ABLATION_CSV_COLUMNS, PLOT_CSV_COLUMNS};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scenelift")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path, frames: &str) {
    let out = run(&["generate", "--out", s(dir), "--frames", frames, "--seed", "11", "--elevations", "10,20,30"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn generate_rejects_zero_frames_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--out", s(&dir.path().join("ds")), "--frames", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("frames"));
}

#[test]
fn options_foreign_to_a_command_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["generate", "--out", s(dir.path()), "--frames", "2", "--sigma-d", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--sigma-d"));
}

#[test]
fn missing_dataset_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["reconstruct", "--dataset", s(&dir.path().join("nope")), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn generated_dataset_has_documented_layout() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), "4");
    for f in ["scene_spec.json", "skeleton.json", "frames/0000.json", "gt/0003.json", "predictions/oracle.json"] {
        assert!(dir.path().join(f).is_file(), "missing {f}");
    }
    let gt = read_json(&dir.path().join("gt/0001.json"));
    assert_eq!(gt["poses"].as_array().unwrap().len(), 2);
}

#[test]
fn oracle_reconstruction_evaluates_to_zero_error() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    let rec = dir.path().join("rec");
    generate(&ds, "6");
    assert!(run(&["reconstruct", "--dataset", s(&ds), "--out", s(&rec)]).status.success());
    let out = run(&["evaluate", "--dataset", s(&ds), "--reconstructions", s(&rec)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report = read_json(&rec.join("report.json"));
    let agg = &report["aggregate"];
    assert_eq!(agg["frames"], 6);
    for k in ["pa_mpjpe_mm", "te_mm", "rde_mm"] {
        assert!(agg[k].as_f64().unwrap() < 1e-6, "{k} = {}", agg[k]);
    }
    let csv = std::fs::read_to_string(rec.join("report.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), REPORT_CSV_COLUMNS.join(","));
    assert_eq!(csv.lines().count(), 1 + 6 + 1);
}

#[test]
fn naive_mode_records_zero_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    let rec = dir.path().join("rec");
    generate(&ds, "3");
    let out = run(&["reconstruct", "--dataset", s(&ds), "--out", s(&rec), "--mode", "naive"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let scene = read_json(&rec.join("scenes/0001.json"));
    let d = &scene["diagnostics"];
    assert!(d["rotation_angles"].as_array().unwrap().iter().all(|a| a.as_f64() == Some(0.0)));
    assert!(d["predicted_thetas"].as_array().unwrap().iter().any(|a| a.as_f64().unwrap() != 0.0));
    assert_eq!(read_json(&rec.join("reconstruction.json"))["mode"], scene["mode"]);
}

#[test]
fn evaluating_against_another_dataset_is_a_pair_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, rec) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("rec"));
    generate(&a, "3");
    generate(&b, "4");
    assert!(run(&["reconstruct", "--dataset", s(&a), "--out", s(&rec)]).status.success());
    let out = run(&["evaluate", "--dataset", s(&b), "--reconstructions", s(&rec)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reconstructions cover 3 frames"));
}

#[test]
fn missing_file_prediction_names_the_frame() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    generate(&ds, "3");
    let mut preds = read_json(&ds.join("predictions/oracle.json"));
    preds["frames"].as_array_mut().unwrap().retain(|f| f["frame_id"] != 2);
    let path = dir.path().join("partial.json");
    std::fs::write(&path, serde_json::to_string(&preds).unwrap()).unwrap();

    let out = run(&[
        "reconstruct", "--dataset", s(&ds), "--out", s(&dir.path().join("rec")),
        "--predictor", "file", "--predictions", s(&path),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no prediction for frame 2"));
}

#[test]
fn file_predictions_reproduce_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    let rec = dir.path().join("rec");
    generate(&ds, "3");
    let preds = ds.join("predictions/oracle.json");
    let out = run(&["reconstruct", "--dataset", s(&ds), "--out", s(&rec), "--predictor", "file", "--predictions", s(&preds)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(run(&["evaluate", "--dataset", s(&ds), "--reconstructions", s(&rec)]).status.success());
    let pa = read_json(&rec.join("report.json"))["aggregate"]["pa_mpjpe_mm"].as_f64().unwrap();
    assert!(pa < 1e-6);
}

#[test]
fn ablate_writes_tables_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    let out_dir = dir.path().join("abl");
    generate(&ds, "6");
    let out = run(&["ablate", "--dataset", s(&ds), "--out", s(&out_dir), "--emit-plot-data"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(out_dir.join("ablation.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), ABLATION_CSV_COLUMNS.join(","));
    assert_eq!(lines.count(), 4);
    let plot = std::fs::read_to_string(out_dir.join("plot_data.csv")).unwrap();
    assert_eq!(plot.lines().next().unwrap(), PLOT_CSV_COLUMNS.join(","));
    assert!(out_dir.join("ablation.txt").is_file());
    assert_eq!(std::fs::read_dir(out_dir.join("reports")).unwrap().count(), 4);
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let ds = dir.path().join("ds");
    std::fs::write(&cfg, format!(r#"{{"out": "{}", "frames": 5, "seed": 3}}"#, s(&ds))).unwrap();
    let out = run(&["generate", "--config", s(&cfg), "--frames", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_dir(ds.join("frames")).unwrap().count(), 2);

    std::fs::write(&cfg, r#"{"frames": 5, "bogus": 1}"#).unwrap();
    assert_eq!(run(&["generate", "--config", s(&cfg)]).status.code(), Some(2));
}
