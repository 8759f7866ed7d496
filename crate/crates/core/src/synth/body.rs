//! A small articulated body used by the synthetic generator.
//!
//! Joints are built in a body-local frame (x toward the person's left, y up,
//! z forward) relative to the pelvis, split into a lower half scaled by leg
//! length and an upper half scaled independently.

use nalgebra::{Rotation3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

const HIP_HALF_WIDTH: f64 = 0.11;
const THIGH: f64 = 0.46;
const SHIN: f64 = 0.44;
const THORAX_Y: f64 = 0.50;
const NECK_Y: f64 = 0.64;
const HEAD_Y: f64 = 0.80;
const SHOULDER_Y: f64 = 0.58;
const SHOULDER_HALF_WIDTH: f64 = 0.17;
const UPPER_ARM: f64 = 0.28;
const FOREARM: f64 = 0.25;
const HAND: f64 = 0.08;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PoseLibrary {
    Standing,
    Crouching,
    Reaching,
    Leaning,
    #[default]
    Mixed,
}

impl PoseLibrary {
    pub const CONCRETE: [PoseLibrary; 4] = [
        PoseLibrary::Standing,
        PoseLibrary::Crouching,
        PoseLibrary::Reaching,
        PoseLibrary::Leaning,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PoseLibrary::Standing => "standing",
            PoseLibrary::Crouching => "crouching",
            PoseLibrary::Reaching => "reaching",
            PoseLibrary::Leaning => "leaning",
            PoseLibrary::Mixed => "mixed",
        }
    }
}

/// Angles in radians. Index 0 of `legs`/`arms` is the left side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Articulation {
    pub kind: PoseLibrary,
    pub lean_forward: f64,
    pub lean_side: f64,
    pub legs: [Limb; 2],
    pub arms: [Limb; 2],
}

/// `flex` swings the limb forward, `abduct` outward, `bend` is the knee or
/// elbow angle (knees bend backward, elbows forward).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Limb {
    pub flex: f64,
    pub abduct: f64,
    pub bend: f64,
}

fn deg<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..=hi).to_radians()
}

fn limb<R: Rng + ?Sized>(rng: &mut R, flex: (f64, f64), abduct: (f64, f64), bend: (f64, f64)) -> Limb {
    Limb {
        flex: deg(rng, flex.0, flex.1),
        abduct: deg(rng, abduct.0, abduct.1),
        bend: deg(rng, bend.0, bend.1),
    }
}

fn standing_leg<R: Rng + ?Sized>(rng: &mut R) -> Limb {
    limb(rng, (-10.0, 15.0), (0.0, 8.0), (0.0, 15.0))
}

fn relaxed_arm<R: Rng + ?Sized>(rng: &mut R) -> Limb {
    limb(rng, (-15.0, 40.0), (5.0, 30.0), (0.0, 60.0))
}

impl Articulation {
    pub fn sample<R: Rng + ?Sized>(library: PoseLibrary, rng: &mut R) -> Self {
        let kind = match library {
            PoseLibrary::Mixed => PoseLibrary::CONCRETE[rng.random_range(0..4)],
            k => k,
        };
        match kind {
            PoseLibrary::Standing | PoseLibrary::Mixed => Self {
                kind: PoseLibrary::Standing,
                lean_forward: deg(rng, -5.0, 8.0),
                lean_side: deg(rng, -5.0, 5.0),
                legs: [standing_leg(rng), standing_leg(rng)],
                arms: [relaxed_arm(rng), relaxed_arm(rng)],
            },
            PoseLibrary::Crouching => {
                let mut leg = || limb(rng, (50.0, 90.0), (5.0, 20.0), (80.0, 120.0));
                let legs = [leg(), leg()];
                let mut arm = || limb(rng, (20.0, 70.0), (5.0, 25.0), (20.0, 90.0));
                let arms = [arm(), arm()];
                Self {
                    kind,
                    lean_forward: deg(rng, 15.0, 40.0),
                    lean_side: deg(rng, -5.0, 5.0),
                    legs,
                    arms,
                }
            }
            PoseLibrary::Reaching => {
                let reach = limb(rng, (70.0, 120.0), (0.0, 30.0), (0.0, 25.0));
                let other = relaxed_arm(rng);
                let arms = if rng.random_bool(0.5) {
                    [reach, other]
                } else {
                    [other, reach]
                };
                Self {
                    kind,
                    lean_forward: deg(rng, 0.0, 20.0),
                    lean_side: deg(rng, -8.0, 8.0),
                    legs: [standing_leg(rng), standing_leg(rng)],
                    arms,
                }
            }
            PoseLibrary::Leaning => {
                let step = limb(rng, (15.0, 35.0), (0.0, 10.0), (0.0, 20.0));
                let back = limb(rng, (-15.0, 0.0), (0.0, 10.0), (0.0, 10.0));
                let legs = if rng.random_bool(0.5) {
                    [step, back]
                } else {
                    [back, step]
                };
                Self {
                    kind,
                    lean_forward: deg(rng, 10.0, 35.0),
                    lean_side: deg(rng, -20.0, 20.0),
                    legs,
                    arms: [relaxed_arm(rng), relaxed_arm(rng)],
                }
            }
        }
    }
}

/// Body-local joints at unit scale, relative to the pelvis.
#[derive(Debug, Clone)]
pub struct LocalBody {
    /// `(name, offset, is_upper)`
    pub joints: Vec<(&'static str, Vector3<f64>, bool)>,
}

/// Unit limb direction; `swing` is measured from straight down toward forward.
fn limb_dir(side: f64, abduct: f64, swing: f64) -> Vector3<f64> {
    Vector3::new(
        side * abduct.sin(),
        -abduct.cos() * swing.cos(),
        abduct.cos() * swing.sin(),
    )
}

impl LocalBody {
    pub fn build(a: &Articulation) -> Self {
        let mut joints = vec![("pelvis", Vector3::zeros(), false)];
        let hip_names = [("l_hip", "l_knee", "l_foot"), ("r_hip", "r_knee", "r_foot")];
        for (i, (hip_n, knee_n, foot_n)) in hip_names.iter().enumerate() {
            let side = if i == 0 { 1.0 } else { -1.0 };
            let leg = a.legs[i];
            let hip = Vector3::new(side * HIP_HALF_WIDTH, 0.0, 0.0);
            let knee = hip + THIGH * limb_dir(side, leg.abduct, leg.flex);
            let foot = knee + SHIN * limb_dir(side, leg.abduct, leg.flex - leg.bend);
            joints.push((hip_n, hip, false));
            joints.push((knee_n, knee, false));
            joints.push((foot_n, foot, false));
        }

        let lean = Rotation3::from_axis_angle(&Vector3::x_axis(), a.lean_forward)
            * Rotation3::from_axis_angle(&Vector3::z_axis(), -a.lean_side);
        let mut upper = vec![
            ("thorax", Vector3::new(0.0, THORAX_Y, 0.0)),
            ("neck", Vector3::new(0.0, NECK_Y, 0.0)),
            ("head", Vector3::new(0.0, HEAD_Y, 0.0)),
        ];
        let arm_names = [
            ("l_shoulder", "l_elbow", "l_wrist", "l_hand"),
            ("r_shoulder", "r_elbow", "r_wrist", "r_hand"),
        ];
        for (i, (sh_n, el_n, wr_n, ha_n)) in arm_names.iter().enumerate() {
            let side = if i == 0 { 1.0 } else { -1.0 };
            let arm = a.arms[i];
            let shoulder = Vector3::new(side * SHOULDER_HALF_WIDTH, SHOULDER_Y, 0.0);
            let elbow = shoulder + UPPER_ARM * limb_dir(side, arm.abduct, arm.flex);
            let fore = limb_dir(side, arm.abduct, arm.flex + arm.bend);
            let wrist = elbow + FOREARM * fore;
            let hand = wrist + HAND * fore;
            upper.push((sh_n, shoulder));
            upper.push((el_n, elbow));
            upper.push((wr_n, wrist));
            upper.push((ha_n, hand));
        }
        joints.extend(upper.into_iter().map(|(n, p)| (n, lean * p, true)));
        Self { joints }
    }

    pub fn get(&self, name: &str) -> Option<(Vector3<f64>, bool)> {
        self.joints
            .iter()
            .find(|(n, _, _)| *n == name)
            .map(|&(_, p, u)| (p, u))
    }

    /// Height of the pelvis above the lowest foot at unit leg scale.
    pub fn pelvis_height(&self) -> f64 {
        let l = self.get("l_foot").expect("body has feet").0.y;
        let r = self.get("r_foot").expect("body has feet").0.y;
        -l.min(r)
    }

    pub fn head(&self) -> Vector3<f64> {
        self.get("head").expect("body has a head").0
    }
}

/// Rotation about the vertical axis taking local forward (+z) to
/// `(sin yaw, 0, cos yaw)`.
pub fn yaw_rotation(yaw: f64) -> Rotation3<f64> {
    Rotation3::from_axis_angle(&Vector3::y_axis(), yaw)
}
