//! JSON scenario files. Angles are degrees in the file and radians inside.
//!
//! ```json
//! {
//!   "initial_joints_deg": [0, 0, 0, 0, 0, 0],
//!   "target_joints_deg": [0.48, 2.21, 2.05, -82.68, 9.46, 77.47],
//!   "mode": "ff+fb",
//!   "disturbance": { "amplitude_deg": [1, 1, 1, 1, 1, 1], "onset": 0.0 }
//! }
//! ```
//!
//! Everything except `initial_joints_deg` and one of `target_joints_deg` /
//! `target_pose` is optional and falls back to the built-in defaults.
//! Unknown keys are rejected.

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::control::ControllerGains;
use crate::error::{Error, Result};
use crate::eye_in_hand::{EihParameters, MarkerSet};
use crate::kinematics::{JointVector, LinkLengths, RobotGeometry};
use crate::se3::{Point3, Pose};
use crate::sim::{Disturbance, Mode, ScenarioConfig, TargetSpec, DEFAULT_TOLERANCE_MM};
use crate::stereo::CameraIntrinsics;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSpec {
    /// Row-major 3×3 rotation.
    pub rotation: [[f64; 3]; 3],
    /// Meters.
    pub translation: [f64; 3],
}

impl PoseSpec {
    pub fn to_pose(&self) -> Result<Pose> {
        let r = &self.rotation;
        let pose = Pose::new(
            Matrix3::new(r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2]),
            Vector3::from(self.translation),
        );
        if !pose.is_valid() {
            return Err(Error::InvalidConfig(format!(
                "rotation is not orthonormal (error {:.3e})",
                pose.orthonormality_error()
            )));
        }
        Ok(pose)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisturbanceSpec {
    pub amplitude_deg: [f64; 6],
    #[serde(default)]
    pub onset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsSpec {
    pub tau_in: Option<f64>,
    pub tau_forward: Option<f64>,
    pub omega_n: Option<f64>,
    pub zeta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraSpec {
    pub focal_length_mm: f64,
    pub baseline_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSpec {
    pub lengths: Option<LinkLengths>,
    pub joint_limits_deg: Option<[[f64; 2]; 6]>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfigFile {
    pub initial_joints_deg: [f64; 6],
    pub target_joints_deg: Option<[f64; 6]>,
    pub target_pose: Option<PoseSpec>,
    /// Three marker positions in the base frame, meters.
    pub markers: Option<[[f64; 3]; 3]>,
    pub mode: Option<Mode>,
    pub gains: Option<GainsSpec>,
    pub disturbance: Option<DisturbanceSpec>,
    pub duration: Option<f64>,
    pub dt: Option<f64>,
    pub adaptive_period: Option<f64>,
    pub tolerance_mm: Option<f64>,
    pub camera: Option<CameraSpec>,
    pub robot: Option<RobotSpec>,
    /// End-effector → camera point map.
    pub t_ec: Option<PoseSpec>,
}

fn rad6(v: &[f64; 6]) -> JointVector {
    JointVector::from_iterator(v.iter().map(|d| d.to_radians()))
}

pub fn parse_markers(m: &[[f64; 3]; 3]) -> Result<MarkerSet> {
    MarkerSet::new(m.map(|p| Point3::new(p[0], p[1], p[2])))
}

/// Reads a marker file: a JSON array of three `[x, y, z]` points, meters.
pub fn load_markers(path: &Path) -> Result<MarkerSet> {
    let text = std::fs::read_to_string(path)?;
    let m: [[f64; 3]; 3] = serde_json::from_str(&text)?;
    parse_markers(&m)
}

impl CliConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Scenario and model parameters; `mode` overrides the file's mode.
    pub fn resolve(&self, mode: Option<Mode>) -> Result<(ScenarioConfig, EihParameters)> {
        let target = match (&self.target_joints_deg, &self.target_pose) {
            (Some(q), None) => TargetSpec::Joints(rad6(q)),
            (None, Some(p)) => TargetSpec::Pose(p.to_pose()?),
            _ => {
                return Err(Error::InvalidConfig(
                    "exactly one of target_joints_deg and target_pose is required".into(),
                ))
            }
        };
        let mut gains = ControllerGains::default();
        if let Some(g) = &self.gains {
            gains.tau_in = g.tau_in.unwrap_or(gains.tau_in);
            gains.tau_forward = g.tau_forward.unwrap_or(0.1 * gains.tau_in);
            gains.omega_n = g.omega_n.unwrap_or(gains.omega_n);
            gains.zeta = g.zeta.unwrap_or(gains.zeta);
        }
        let mode = mode
            .or(self.mode)
            .ok_or_else(|| Error::InvalidConfig("mode missing (give --mode or \"mode\")".into()))?;
        let defaults = ScenarioConfig::scenario1(mode);
        let cfg = ScenarioConfig {
            initial_joints: rad6(&self.initial_joints_deg),
            target,
            markers: match &self.markers {
                Some(m) => parse_markers(m)?,
                None => MarkerSet::default(),
            },
            gains,
            disturbance: self
                .disturbance
                .as_ref()
                .map(|d| Disturbance {
                    amplitude: d.amplitude_deg.map(f64::to_radians),
                    onset: d.onset,
                })
                .unwrap_or_default(),
            mode,
            duration: self.duration.unwrap_or(defaults.duration),
            dt: self.dt.unwrap_or(defaults.dt),
            adaptive_period: self.adaptive_period.unwrap_or(defaults.adaptive_period),
            tolerance: self.tolerance_mm.unwrap_or(DEFAULT_TOLERANCE_MM),
        };
        cfg.validate()?;

        let mut params = EihParameters::default();
        if let Some(c) = &self.camera {
            params.intr = CameraIntrinsics::new(c.focal_length_mm, c.baseline_mm)?;
        }
        if let Some(r) = &self.robot {
            let base = RobotGeometry::default();
            params.geom = RobotGeometry::from_lengths(
                r.lengths.unwrap_or(base.lengths),
                r.joint_limits_deg.map(|l| l.map(|[a, b]| [a.to_radians(), b.to_radians()])).unwrap_or(base.joint_limits),
            )?;
        }
        if let Some(t) = &self.t_ec {
            params.t_ec = t.to_pose()?;
        }
        Ok((cfg, params))
    }
}
