//! Stereo image-based visual servoing of a six-axis arm: stereo projection
//! and triangulation, DH kinematics, three-point pose recovery, hand-eye
//! calibration data, and a feedforward + adaptive Youla controller with a
//! fixed-step closed-loop simulator.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod cli;
pub mod config;
pub mod control;
pub mod error;
pub mod eye_in_hand;
pub mod hand_eye;
pub mod kinematics;
pub mod report;
pub mod se3;
pub mod sim;
pub mod stereo;

pub use error::{Error, Result};
pub use eye_in_hand::{EihParameters, FeatureVector, MarkerSet};
pub use kinematics::{JointVector, RobotGeometry};
pub use se3::{Point3, Pose};
pub use sim::{run_scenario, Mode, RunLog, RunSummary, ScenarioConfig};
pub use stereo::{CameraIntrinsics, ImageTriplet};
