//! Fixed-step closed-loop simulation of the feedforward + adaptive feedback
//! servoing architecture.
//!
//! Per step: measure features at the current joint angles, form the image
//! error, run the outer controller, add the feedforward joint reference,
//! advance the six inner joint loops, then add the joint disturbance. Every
//! `adaptive_period` the joints are re-estimated from the features and the
//! outer controller is re-synthesized around the new Jacobian.

use serde::{Deserialize, Serialize};

use crate::control::{
    realize_discrete, synthesize_feedforward, synthesize_outer, ControllerGains, InnerLoop, OuterController,
    StateSpaceD,
};
use crate::error::{Error, Result};
use crate::eye_in_hand::{eih_jacobian, eih_map, estimate_joints_near, EihParameters, FeatureVector, MarkerSet};
use crate::kinematics::{inverse_kinematics, JointVector};
use crate::se3::Pose;

/// Joint magnitude beyond which a run is declared divergent, radians.
pub const DIVERGENCE_LIMIT: f64 = 10.0 * std::f64::consts::PI;

/// Default settling tolerance on image coordinates, mm.
pub const DEFAULT_TOLERANCE_MM: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "fb")]
    FeedbackOnly,
    #[serde(rename = "ff+fb")]
    FeedforwardFeedback,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::FeedbackOnly => "fb",
            Mode::FeedforwardFeedback => "ff+fb",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fb" | "feedback_only" => Ok(Mode::FeedbackOnly),
            "ff+fb" | "feedforward_feedback" => Ok(Mode::FeedforwardFeedback),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}` (expected fb or ff+fb)"))),
        }
    }
}

/// Step disturbance added to every joint output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disturbance {
    /// Per-joint amplitude, radians.
    pub amplitude: [f64; 6],
    /// Onset time, s.
    pub onset: f64,
}

impl Default for Disturbance {
    fn default() -> Self {
        Self { amplitude: [0.0; 6], onset: 0.0 }
    }
}

impl Disturbance {
    pub fn at(&self, t: f64) -> JointVector {
        if t >= self.onset {
            JointVector::from(self.amplitude)
        } else {
            JointVector::zeros()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpec {
    Joints(JointVector),
    /// Tool pose in the base frame.
    Pose(Pose),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub initial_joints: JointVector,
    pub target: TargetSpec,
    pub markers: MarkerSet,
    pub gains: ControllerGains,
    pub disturbance: Disturbance,
    pub mode: Mode,
    pub duration: f64,
    pub dt: f64,
    pub adaptive_period: f64,
    /// Settling tolerance on image coordinates, mm.
    pub tolerance: f64,
}

fn deg6(v: [f64; 6]) -> JointVector {
    JointVector::from_iterator(v.iter().map(|d| d.to_radians()))
}

impl ScenarioConfig {
    /// Home pose to the first target, no disturbance.
    pub fn scenario1(mode: Mode) -> Self {
        Self {
            initial_joints: JointVector::zeros(),
            target: TargetSpec::Joints(deg6([0.48, 2.21, 2.05, -82.68, 9.46, 77.47])),
            markers: MarkerSet::default(),
            gains: ControllerGains::default(),
            disturbance: Disturbance::default(),
            mode,
            duration: 5.0,
            dt: 1e-4,
            adaptive_period: 0.01,
            tolerance: DEFAULT_TOLERANCE_MM,
        }
    }

    /// Second maneuver with a 1° step disturbance on every joint from t = 0.
    pub fn scenario2(mode: Mode) -> Self {
        Self {
            initial_joints: deg6([42.40, 21.20, 4.58, -2.86, 66.46, -42.40]),
            target: TargetSpec::Joints(deg6([45.0, 18.59, 4.35, 0.0, 67.06, -45.0])),
            disturbance: Disturbance { amplitude: [1f64.to_radians(); 6], onset: 0.0 },
            ..Self::scenario1(mode)
        }
    }

    pub fn builtin(name: &str, mode: Mode) -> Option<Self> {
        match name {
            "scenario1" => Some(Self::scenario1(mode)),
            "scenario2" => Some(Self::scenario2(mode)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.adaptive_period >= self.dt) {
            return bad(format!("adaptive_period ({}) must be at least dt ({})", self.adaptive_period, self.dt));
        }
        if !(self.tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tolerance));
        }
        if self.initial_joints.iter().any(|q| !q.is_finite()) {
            return bad("initial joints must be finite".into());
        }
        self.gains.validate()
    }

    pub fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }
}

/// Time series of one run; row `k` is time `k·dt`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLog {
    pub time: Vec<f64>,
    pub q: Vec<[f64; 6]>,
    pub q_ref: Vec<[f64; 6]>,
    pub q_feedback: Vec<[f64; 6]>,
    pub q_feedforward: Vec<[f64; 6]>,
    pub features: Vec<[f64; 9]>,
    pub feature_targets: [f64; 9],
    pub feature_error: Vec<[f64; 9]>,
    /// `Uᵀ·e` with the controller's basis at that time.
    pub projected_error: Vec<[f64; 9]>,
}

impl RunLog {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    fn max_abs(row: &[f64]) -> f64 {
        row.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Settling time of `max |e|` over all nine image coordinates.
    pub fn settling_time(&self, tolerance: f64) -> f64 {
        let e: Vec<f64> = self.feature_error.iter().map(|r| Self::max_abs(r)).collect();
        settling_time(&self.time, &e, tolerance)
    }

    /// Settling time of the six controllable projected channels.
    pub fn projected_settling_time(&self, tolerance: f64) -> f64 {
        let e: Vec<f64> = self.projected_error.iter().map(|r| Self::max_abs(&r[..6])).collect();
        settling_time(&self.time, &e, tolerance)
    }
}

/// First time after which `error` stays within `tolerance`; `+∞` if the last
/// sample is still outside.
pub fn settling_time(time: &[f64], error: &[f64], tolerance: f64) -> f64 {
    assert_eq!(time.len(), error.len());
    match error.iter().rposition(|e| !(e.abs() <= tolerance)) {
        None => time.first().copied().unwrap_or(0.0),
        Some(k) if k + 1 < time.len() => time[k + 1],
        Some(_) => f64::INFINITY,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mode: Mode,
    pub duration: f64,
    pub dt: f64,
    pub tolerance_mm: f64,
    /// Settling time of all nine image coordinates; `None` if unsettled.
    pub settling_time: Option<f64>,
    /// Settling time of the six controllable projected channels.
    pub projected_settling_time: Option<f64>,
    pub final_feature_residuals: [f64; 9],
    /// Final joint angles minus target joints, rad.
    pub final_joint_error: [f64; 6],
    pub converged_all_nine: bool,
    pub six_channels_settled: bool,
    pub projected_error_final: [f64; 9],
    /// `max |e|` over the third marker's coordinates at the end, mm.
    pub point3_residual: f64,
    pub target_joints: [f64; 6],
    pub initial_linearization: String,
    pub adaptive_updates: usize,
    pub skipped_updates: usize,
}

impl RunSummary {
    /// Convergence in the sense appropriate to the mode: all nine
    /// coordinates with feedforward, the six controllable channels without.
    pub fn converged(&self) -> bool {
        match self.mode {
            Mode::FeedforwardFeedback => self.converged_all_nine && self.settling_time.is_some(),
            Mode::FeedbackOnly => self.six_channels_settled,
        }
    }
}

fn to_arr6(v: &JointVector) -> [f64; 6] {
    v.as_slice().try_into().expect("6 entries")
}

fn to_arr9(v: &FeatureVector) -> [f64; 9] {
    v.as_slice().try_into().expect("9 entries")
}

/// Runs a scenario to completion.
pub fn run_scenario(cfg: &ScenarioConfig, params: &EihParameters) -> Result<(RunLog, RunSummary)> {
    cfg.validate()?;
    let target_joints = match &cfg.target {
        TargetSpec::Joints(q) => *q,
        TargetSpec::Pose(p) => {
            inverse_kinematics(&params.geom, p).map_err(|e| Error::TargetUnreachable(Box::new(e)))?
        }
    };
    let target_features =
        eih_map(params, &target_joints, &cfg.markers).map_err(|e| Error::TargetUnreachable(Box::new(e)))?;

    let dt = cfg.dt;
    let q0 = cfg.initial_joints;
    let mut q = q0 + cfg.disturbance.at(0.0);

    let mut inner = Vec::with_capacity(6);
    let mut feedforward: Vec<StateSpaceD> = Vec::with_capacity(6);
    let ff_tf = synthesize_feedforward(&cfg.gains)?;
    let inner_proto = InnerLoop::from_gains(&cfg.gains, dt)?;
    let ff_proto = realize_discrete(&ff_tf, dt)?;
    for i in 0..6 {
        let mut lp = inner_proto.clone();
        lp.settle_at(q0[i])?;
        inner.push(lp);
        let mut ff = ff_proto.clone();
        ff.set_steady_state(q0[i])?;
        feedforward.push(ff);
    }

    // linearize at the estimated start; fall back to the target when the
    // start is singular
    let f0 = eih_map(params, &q, &cfg.markers)?;
    let initial = estimate_joints_near(params, &f0, &cfg.markers, &q)
        .and_then(|qe| eih_jacobian(params, &qe, &cfg.markers).map(|j| (qe, j)))
        .and_then(|(qe, j)| synthesize_outer(&j, &cfg.gains).map(|s| (qe, s)));
    let (mut q_est, synthesis, initial_linearization) = match initial {
        Ok((qe, s)) => (qe, s, "estimated"),
        Err(_) => {
            let j = eih_jacobian(params, &target_joints, &cfg.markers)
                .map_err(|e| Error::TargetUnreachable(Box::new(e)))?;
            let s = synthesize_outer(&j, &cfg.gains).map_err(|e| Error::TargetUnreachable(Box::new(e)))?;
            (q, s, "target")
        }
    };
    let mut outer = OuterController::new(synthesis, dt)?;

    let n = cfg.steps();
    let every = ((cfg.adaptive_period / dt).round() as usize).max(1);
    let mut log = RunLog { feature_targets: to_arr9(&target_features), ..RunLog::default() };
    for v in [&mut log.q, &mut log.q_ref, &mut log.q_feedback, &mut log.q_feedforward] {
        v.reserve(n + 1);
    }
    let (mut updates, mut skipped) = (0usize, 0usize);

    for k in 0..=n {
        let t = k as f64 * dt;
        let f = eih_map(params, &q, &cfg.markers)?;
        let e = target_features - f;

        if k > 0 && k % every == 0 {
            let refreshed = estimate_joints_near(params, &f, &cfg.markers, &q_est).and_then(|qe| {
                q_est = qe;
                eih_jacobian(params, &qe, &cfg.markers)
            });
            match refreshed.and_then(|j| outer.update(&j)) {
                Ok(()) => updates += 1,
                Err(_) => skipped += 1,
            }
        }

        let q_fb = outer.step(&e);
        let q_ff = match cfg.mode {
            Mode::FeedforwardFeedback => {
                JointVector::from_fn(|i, _| feedforward[i].step(target_joints[i]))
            }
            Mode::FeedbackOnly => q0,
        };
        let q_ref = q_ff + q_fb;

        log.time.push(t);
        log.q.push(to_arr6(&q));
        log.q_ref.push(to_arr6(&q_ref));
        log.q_feedback.push(to_arr6(&q_fb));
        log.q_feedforward.push(to_arr6(&q_ff));
        log.features.push(to_arr9(&f));
        log.feature_error.push(to_arr9(&e));
        log.projected_error.push(to_arr9(&outer.synthesis.project(&e)));

        let q_inner = JointVector::from_fn(|i, _| inner[i].step(q_ref[i]));
        q = q_inner + cfg.disturbance.at(t + dt);
        if let Some(i) = q.iter().position(|v| !(v.abs() <= DIVERGENCE_LIMIT)) {
            return Err(Error::SimDiverged { time: t + dt, joint: i + 1, value: q[i] });
        }
    }

    let last = log.len() - 1;
    let residuals = log.feature_error[last];
    let projected = log.projected_error[last];
    let finite = |t: f64| t.is_finite().then_some(t);
    let settling = finite(log.settling_time(cfg.tolerance));
    let projected_settling = finite(log.projected_settling_time(cfg.tolerance));
    let summary = RunSummary {
        mode: cfg.mode,
        duration: cfg.duration,
        dt,
        tolerance_mm: cfg.tolerance,
        settling_time: settling,
        projected_settling_time: projected_settling,
        final_feature_residuals: residuals,
        final_joint_error: to_arr6(&(JointVector::from(log.q[last]) - target_joints)),
        converged_all_nine: residuals.iter().all(|e| e.abs() < cfg.tolerance),
        six_channels_settled: projected_settling.is_some(),
        projected_error_final: projected,
        point3_residual: residuals[6..].iter().fold(0.0, |m, v| m.max(v.abs())),
        target_joints: to_arr6(&target_joints),
        initial_linearization: initial_linearization.to_string(),
        adaptive_updates: updates,
        skipped_updates: skipped,
    };
    Ok((log, summary))
}
