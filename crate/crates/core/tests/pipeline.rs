use approx::assert_relative_eq;
use proptest::prelude::*;
use scenelift::composer::reconstruct_joint_lifting;
use scenelift::pipeline::predict_frame;
use scenelift::prelude::*;

fn frames(n: usize, seed: u64, scene: SceneSpec, sweep: CameraSweep) -> Dataset {
    let config = DatasetConfig::new(n, SceneSpec { seed, ..scene }, CameraConfig::default(), sweep);
    Dataset::generate(config, Skeleton::default_body()).unwrap()
}

fn settings<'a>(predictor: &'a dyn Predictor, sk: &'a Skeleton) -> RunSettings<'a> {
    RunSettings {
        predictor,
        skeleton: sk,
        constants: Constants::default(),
        sign: CompensationSign::AsPrinted,
        rde_variant: RdeVariant::Vector,
    }
}

#[test]
fn error_grows_with_depth_noise() {
    let ds = frames(60, 4, SceneSpec::default(), CameraSweep::default());
    let mut last = -1.0;
    for sigma_d in [0.0, 0.02, 0.1, 0.3] {
        let p = NoisyOraclePredictor::new(sigma_d, 0.0, 1).unwrap();
        let report = evaluate_mode(&ds.frames, AblationMode::FULL, &settings(&p, &ds.skeleton)).unwrap();
        let pa = report.aggregate.pa_mpjpe_mm;
        assert!(pa > last, "sigma_d {sigma_d}: {pa} <= {last}");
        last = pa;
    }
}

#[test]
fn zero_noise_matches_the_oracle_exactly() {
    let ds = frames(10, 9, SceneSpec::default(), CameraSweep::default());
    let noisy = NoisyOraclePredictor::new(0.0, 0.0, 123).unwrap();
    for fr in &ds.frames {
        assert_eq!(predict_frame(fr, &noisy).unwrap(), predict_frame(fr, &OraclePredictor).unwrap());
    }
}

#[test]
fn lowest_foot_rests_on_the_floor_in_every_mode() {
    let ds = frames(40, 5, SceneSpec::default(), CameraSweep::default());
    let sk = &ds.skeleton;
    let noisy = NoisyOraclePredictor::new(0.05, 0.02, 2).unwrap();
    let predictors: [&dyn Predictor; 2] = [&OraclePredictor, &noisy];
    for predictor in predictors {
        for mode in AblationMode::table_rows() {
            for fr in &ds.frames {
                let Ok(r) = reconstruct_frame(fr, predictor, sk, mode, &Constants::default(), CompensationSign::AsPrinted)
                else {
                    continue;
                };
                for pose in r.scene.poses() {
                    let lowest = sk.feet().iter().map(|&f| pose.joint(f).y).fold(f64::INFINITY, f64::min);
                    assert!(lowest.abs() < 1e-9, "frame {} mode {mode}: {lowest}", fr.frame_id);
                }
            }
        }
    }
}

#[test]
fn recorded_diagnostics_replay_the_scene() {
    let ds = frames(20, 6, SceneSpec::default(), CameraSweep::default());
    let sk = &ds.skeleton;
    let c = Constants::default().c;
    let noisy = NoisyOraclePredictor::new(0.05, 0.02, 3).unwrap();
    for mode in AblationMode::table_rows() {
        for fr in &ds.frames {
            let preds = predict_frame(fr, &noisy).unwrap();
            let Ok(r) = reconstruct_frame(fr, &noisy, sk, mode, &Constants::default(), CompensationSign::AsPrinted)
            else {
                continue;
            };
            let poses = fr.poses_2d();
            let lifted: Vec<Pose3D> = r.order.iter().map(|&i| lift_pose(&poses[i], &preds[i], c).unwrap()).collect();
            let replayed = r.replay(&lifted, sk).unwrap();
            for (a, b) in replayed.all_joints().zip(r.scene.all_joints()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn naive_placement_is_worse_than_full_at_elevation() {
    let ds = frames(30, 8, SceneSpec::default(), CameraSweep::Fixed { elevations_deg: vec![20.0] });
    let s = settings(&OraclePredictor, &ds.skeleton);
    let naive = evaluate_mode(&ds.frames, AblationMode::NAIVE, &s).unwrap().aggregate.pa_mpjpe_mm;
    let full = evaluate_mode(&ds.frames, AblationMode::FULL, &s).unwrap().aggregate.pa_mpjpe_mm;
    assert!(full < 1e-6, "full {full}");
    assert!(naive > 1.0, "naive {naive}");
}

/// Per-pose normalization discards absolute depth, so people at different
/// distances from the camera cannot be placed exactly by any mode.
#[test]
fn depth_separation_defeats_every_mode() {
    let scene = SceneSpec {
        depth_separation: [1.0, 2.0],
        ..Default::default()
    };
    let ds = frames(30, 8, scene, CameraSweep::Fixed { elevations_deg: vec![20.0] });
    let s = settings(&OraclePredictor, &ds.skeleton);
    for mode in AblationMode::table_rows() {
        let pa = evaluate_mode(&ds.frames, mode, &s).unwrap().aggregate.pa_mpjpe_mm;
        assert!(pa > 50.0, "{mode}: {pa}");
    }
}

#[test]
fn joint_lifting_baseline_loses_the_elevation_offset() {
    let ds = frames(20, 10, SceneSpec::default(), CameraSweep::Fixed { elevations_deg: vec![30.0] });
    let sk = &ds.skeleton;
    let mut worst: f64 = 0.0;
    for fr in &ds.frames {
        let preds = predict_frame(fr, &OraclePredictor).unwrap();
        let scene = reconstruct_joint_lifting(&fr.poses_2d(), &preds, sk, Constants::default().c).unwrap();
        let gt = fr.world_scene(sk).unwrap();
        worst = worst.max(pa_mpjpe(&scene, &gt).unwrap() * fr.mm_per_unit);
    }
    assert!(worst > 1.0, "joint lifting never erred: {worst} mm");
}

#[test]
fn opposite_sign_breaks_exactness() {
    let ds = frames(20, 12, SceneSpec::default(), CameraSweep::Fixed { elevations_deg: vec![25.0] });
    let mut s = settings(&OraclePredictor, &ds.skeleton);
    s.sign = CompensationSign::Opposite;
    let pa = evaluate_mode(&ds.frames, AblationMode::FULL, &s).unwrap().aggregate.pa_mpjpe_mm;
    assert!(pa > 1.0, "{pa}");
}

#[test]
fn prediction_store_survives_a_file_round_trip() {
    let ds = frames(5, 13, SceneSpec::default(), CameraSweep::default());
    let noisy = NoisyOraclePredictor::new(0.1, 0.05, 4).unwrap();
    let mut store = PredictionStore::new();
    for fr in &ds.frames {
        for (p, pred) in fr.persons.iter().zip(predict_frame(fr, &noisy).unwrap()) {
            store.insert(fr.frame_id, p.pose_id, pred).unwrap();
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("preds.json");
    store.save(&path).unwrap();
    let loaded = scenelift::lifter::load_predictions(&path).unwrap();
    for fr in &ds.frames {
        assert_eq!(predict_frame(fr, &loaded).unwrap(), predict_frame(fr, &noisy).unwrap());
    }
}

#[test]
fn loaded_dataset_equals_generated_one() {
    let ds = frames(6, 14, SceneSpec::default(), CameraSweep::default());
    let dir = tempfile::tempdir().unwrap();
    ds.save(dir.path()).unwrap();
    let back = scenelift::synth::load_dataset(dir.path()).unwrap();
    assert_eq!(back.frames.len(), ds.frames.len());
    for (a, b) in back.frames.iter().zip(&ds.frames) {
        assert_eq!(a.frame_id, b.frame_id);
        assert_relative_eq!(a.mm_per_unit, b.mm_per_unit, max_relative = 1e-12);
        for (pa, pb) in a.persons.iter().zip(&b.persons) {
            for (x, y) in pa.world.coords.iter().zip(&pb.world.coords) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }
}

proptest! {
    #[test]
    fn lift_then_project_is_identity(x in -2.0..2.0f64, y in -2.0..2.0f64, d in -8.0..20.0f64, c in 2.5..50.0f64) {
        let p = lift_keypoint(x, y, d, c).unwrap();
        prop_assert!(p.z >= 1.0);
        let (px, py) = project_keypoint(&p).unwrap();
        prop_assert!((px - x).abs() < 1e-12 && (py - y).abs() < 1e-12);
    }

    #[test]
    fn elevation_offset_is_antisymmetric(a in -1.2..1.2f64, b in -1.2..1.2f64, c in 2.5..50.0f64) {
        let (ta, tb) = (ElevationAngle::new(a).unwrap(), ElevationAngle::new(b).unwrap());
        assert_relative_eq!(elevation_offset(ta, tb, c), -elevation_offset(tb, ta, c), epsilon = 1e-12);
        prop_assert_eq!(elevation_offset(ta, ta, c), 0.0);
    }

    #[test]
    fn compensation_rotation_is_orthonormal(t in -1.5..1.5f64) {
        let r = *rotation_about_x(ElevationAngle::new(t).unwrap()).matrix();
        prop_assert!((r * r.transpose() - nalgebra::Matrix3::identity()).norm() < 1e-12);
        assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn generated_frames_validate(seed in 0u64..5000, elev in -40.0..40.0f64) {
        let sk = Skeleton::default_body();
        let camera = CameraConfig::default().with_elevation(elev);
        let frame = generate_frame(&SceneSpec { seed, ..Default::default() }, &camera, &sk, seed).unwrap();
        frame.validate(&sk).unwrap();
    }
}
