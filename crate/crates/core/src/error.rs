use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing joint `{0}`")]
    MissingJoint(String),
    #[error("degenerate pose: {0}")]
    DegeneratePose(String),
    #[error("root joint `{name}` is {distance_px} px away from the hip midpoint")]
    RootMismatch { name: String, distance_px: f64 },
    #[error("invalid skeleton: {0}")]
    InvalidSkeleton(String),
    #[error("non-finite input: {0}")]
    NonFiniteInput(String),
    #[error("joint count mismatch: expected {expected}, got {actual}")]
    JointCountMismatch { expected: usize, actual: usize },
    #[error("depth {0} is below the clamp floor of 1")]
    DepthTooSmall(f64),
    #[error("elevation angle {0} rad is outside (-pi/2, pi/2)")]
    InvalidAngle(f64),
    #[error("oracle predictor needs a ground-truth handle")]
    MissingGroundTruth,
    #[error("no prediction for frame {frame_id} pose {pose_id}")]
    PredictionNotFound { frame_id: u64, pose_id: u64 },
    #[error("schema violation in {location}: {message}")]
    SchemaViolation { location: String, message: String },
    #[error("reconstruction needs at least two poses, got {0}")]
    FewerThanTwoPoses(usize),
    #[error("degenerate scaling for pose {pose}: {reason}")]
    DegenerateScaling { pose: usize, reason: String },
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("ground-truth pose {0} has zero norm")]
    ZeroNormPose(usize),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("scene pair mismatch: {0}")]
    ScenePairMismatch(String),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn schema(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::SchemaViolation {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line front end: 2 for validation
    /// errors, 3 for data errors, 4 for anything internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidSpec(_)
            | Error::InvalidSkeleton(_)
            | Error::InvalidAngle(_)
            | Error::NonFiniteInput(_) => 2,
            Error::MissingJoint(_)
            | Error::DegeneratePose(_)
            | Error::RootMismatch { .. }
            | Error::JointCountMismatch { .. }
            | Error::DepthTooSmall(_)
            | Error::MissingGroundTruth
            | Error::PredictionNotFound { .. }
            | Error::SchemaViolation { .. }
            | Error::FewerThanTwoPoses(_)
            | Error::DegenerateScaling { .. }
            | Error::DegenerateConfiguration(_)
            | Error::ZeroNormPose(_)
            | Error::ScenePairMismatch(_)
            | Error::Io { .. } => 3,
        }
    }
}
