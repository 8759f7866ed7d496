//! Multi-person 3D scene reconstruction from 2D poses.
//!
//! Each person's 2D pose is normalized and lifted to 3D on its own, using
//! per-joint depth offsets and an elevation angle from a lifter. The
//! poses are then placed in one scene:
//!
//! 1. each pose is rotated back by its elevation angle ([`geometry::rotation_about_x`]);
//! 2. the vertical offset between pelvises comes from the two angles
//!    ([`geometry::elevation_offset`]);
//! 3. the horizontal offset comes from the image;
//! 4. every pose is scaled so its lowest foot touches the floor.
//!
//! [`synth`] generates two-person scenes whose ground truth the pipeline
//! reproduces exactly from oracle predictions, and [`metrics`] implements
//! PA-MPJPE, scale error, translation error and root displacement error.
//!
//! ```
//! use scenelift::prelude::*;
//!
//! let skeleton = Skeleton::default_body();
//! let frame = generate_frame(&SceneSpec::default(), &CameraConfig::default(), &skeleton, 0)?;
//! let result = reconstruct_frame(
//!     &frame,
//!     &OraclePredictor,
//!     &skeleton,
//!     AblationMode::FULL,
//!     &Constants::default(),
//!     CompensationSign::AsPrinted,
//! )?;
//! let m = evaluate_reconstruction(&frame, &result, &skeleton, RdeVariant::Vector)?;
//! assert!(m.pa_mpjpe_mm < 1e-6);
//! # Ok::<(), scenelift::Error>(())
//! ```

pub mod cli;
pub mod composer;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lifter;
pub mod metrics;
pub mod pipeline;
pub mod pose;
mod rng;
pub mod skeleton;
pub mod synth;

pub use error::{Error, Result};

/// The types most programs need.
pub mod prelude {
    pub use crate::composer::{reconstruct, reconstruct_with_sign, AblationMode, ReconstructionResult};
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{
        elevation_offset, lift_keypoint, lift_pose, project_keypoint, rotate_pose, rotation_about_x,
        CompensationSign, ElevationAngle, RotationMatrix3,
    };
    pub use crate::lifter::{
        LiftPrediction, NoisyOraclePredictor, OraclePredictor, PredictContext, PredictionStore,
        Predictor, PredictorSpec,
    };
    pub use crate::metrics::{
        align_scene, evaluate_frame, pa_mpjpe, root_displacement_error, scale_error,
        translation_error, MetricReport, RdeVariant,
    };
    pub use crate::pipeline::{
        ablate, evaluate_mode, evaluate_reconstruction, reconstruct_frame, RunSettings,
    };
    pub use crate::pose::{normalize_pose, Constants, Pose2D, Pose3D, Scene3D};
    pub use crate::skeleton::{KeypointId, Skeleton};
    pub use crate::synth::{
        generate_frame, CameraConfig, CameraSweep, Dataset, DatasetConfig, GroundTruthFrame,
        SceneSpec,
    };
}
