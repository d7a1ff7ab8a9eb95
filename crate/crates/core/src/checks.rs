//! Self-checks runnable from the command line (`servo-forge check`).

use std::f64::consts::PI;

use nalgebra::Complex;

use crate::control::{
    inner_closed_loop, joint_plant, realize_discrete, synthesize_feedforward, synthesize_inner, synthesize_outer,
    ControllerGains, InnerLoop, Poly, RationalTF,
};
use crate::error::Error;
use crate::eye_in_hand::{eih_jacobian, eih_map, estimate_joints, pose_from_features, EihParameters, MarkerSet};
use crate::kinematics::{check_limits, forward_kinematics, inverse_kinematics, safe_bounds, JointVector, RobotGeometry};
use crate::se3::{Point3, Pose};
use crate::sim::ScenarioConfig;
use crate::stereo::{project, triangulate, CameraIntrinsics, ImageTriplet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Kinematics,
    Camera,
    Control,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "kinematics" => Ok(Suite::Kinematics),
            "camera" => Ok(Suite::Camera),
            "control" => Ok(Suite::Control),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidConfig(format!("unknown suite `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &'static str, name: &'static str, value: f64, bound: f64) -> CheckResult {
    CheckResult { suite, name, passed: value <= bound, detail: format!("{value:.3e} (bound {bound:.0e})") }
}

fn flag(suite: &'static str, name: &'static str, passed: bool, detail: impl Into<String>) -> CheckResult {
    CheckResult { suite, name, passed, detail: detail.into() }
}

/// Deterministic low-discrepancy points in `[0, 1)^d` (Halton).
fn halton(index: usize, base: usize) -> f64 {
    let (mut f, mut r, mut i) = (1.0, 0.0, index);
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [usize; 6] = [2, 3, 5, 7, 11, 13];

pub fn kinematics_suite() -> Vec<CheckResult> {
    const S: &str = "kinematics";
    let g = RobotGeometry::default();
    let home = Pose::new(
        nalgebra::Matrix3::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0),
        nalgebra::Vector3::new(1.27, 0.0, 1.57),
    );
    let mut out = vec![check(S, "home pose", forward_kinematics(&g, &JointVector::zeros()).max_abs_diff(&home), 1e-9)];

    let bounds = safe_bounds(&g);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for k in 1..=500 {
        let q = JointVector::from_fn(|i, _| bounds[i][0] + halton(k, PRIMES[i]) * (bounds[i][1] - bounds[i][0]));
        match inverse_kinematics(&g, &forward_kinematics(&g, &q)) {
            Ok(back) if crate::kinematics::is_safe_configuration(&g, &q) => worst = worst.max((back - q).amax()),
            Ok(_) => {}
            Err(_) => failures += 1,
        }
    }
    out.push(check(S, "IK∘FK round trip", worst, 1e-6));
    out.push(flag(S, "IK solves every sample", failures == 0, format!("{failures} failures")));

    let mut over = JointVector::zeros();
    over[1] = 160f64.to_radians();
    let mut edge = JointVector::zeros();
    edge[0] = -PI;
    out.push(flag(
        S,
        "joint limits",
        check_limits(&g, &over).len() == 1 && check_limits(&g, &edge).is_empty(),
        "axis 2 at 160° flagged, axis 1 at −180° accepted",
    ));
    out
}

pub fn camera_suite() -> Vec<CheckResult> {
    const S: &str = "camera";
    let intr = CameraIntrinsics::default();
    let t = project(&intr, &Point3::new(0.0, 0.0, 1000.0)).expect("positive depth");
    let mut out = vec![check(S, "projection example", (t.u_l + 0.168).abs().max((t.u_r - 0.168).abs()), 1e-15)];

    let mut worst = 0.0f64;
    for k in 1..=2000 {
        let p = Point3::new(
            -5000.0 + 10000.0 * halton(k, 2),
            -5000.0 + 10000.0 * halton(k, 3),
            500.0 + 24500.0 * halton(k, 5),
        );
        let back = project(&intr, &p).and_then(|t| triangulate(&intr, &t));
        worst = worst.max(back.map(|b| (b - p).norm() / p.coords.norm()).unwrap_or(f64::INFINITY));
    }
    out.push(check(S, "triangulate∘project round trip", worst, 1e-9));
    out.push(flag(
        S,
        "zero disparity rejected",
        matches!(triangulate(&intr, &ImageTriplet::new(1.0, 1.0, 0.0)), Err(Error::ZeroDisparity { .. })),
        "",
    ));

    let params = EihParameters::default();
    let markers = MarkerSet::default();
    let recovered = eih_map(&params, &JointVector::zeros(), &markers)
        .and_then(|f| pose_from_features(&params.intr, &f, &markers).map(|c| (f, c)));
    match recovered {
        Ok((f, cam)) => {
            let home = forward_kinematics(&params.geom, &JointVector::zeros());
            out.push(check(S, "home pose from features", params.tool_pose(&cam).max_abs_diff(&home), 1e-9));
            let q = estimate_joints(&params, &f, &markers).map(|q| q.amax()).unwrap_or(f64::INFINITY);
            out.push(check(S, "home joints from features", q, 1e-9));
        }
        Err(e) => out.push(flag(S, "home pose from features", false, e.to_string())),
    }
    out
}

pub fn control_suite() -> Vec<CheckResult> {
    const S: &str = "control";
    let gains = ControllerGains::default();
    let t = inner_closed_loop(gains.tau_in);
    let mut out = vec![
        flag(
            S,
            "interpolation T(0) = 1, T'(0) = 0",
            t.num.coeff(0) == t.den.coeff(0) && t.num.coeff(1) == t.den.coeff(1),
            "symbolic coefficients",
        ),
    ];
    let h = 1e-6;
    let dt0 = (t.eval_real(h).unwrap_or(f64::NAN) - t.eval_real(-h).unwrap_or(f64::NAN)) / (2.0 * h);
    out.push(check(S, "T'(0) by central difference", dt0.abs(), 1e-6));

    match synthesize_inner(&gains) {
        Ok(d) => {
            let expected = RationalTF::from_coeffs(&[1.0, 3.0 * gains.tau_in], &[3.0 * gains.tau_in.powi(2), gains.tau_in.powi(3)]);
            out.push(flag(S, "Gc = (3τs+1)/(τ³s+3τ²)", d.gc.approx_eq(&expected, 1e-9), ""));
            let cl = (&d.gc * &joint_plant()).feedback_unity().minreal();
            out.push(flag(S, "Gc around 1/s² gives T", cl.approx_eq(&t, 1e-9), ""));
        }
        Err(e) => out.push(flag(S, "inner synthesis", false, e.to_string())),
    }

    let step_err = InnerLoop::from_gains(&gains, 1e-4).and_then(|mut lp| {
        let mut reference = realize_discrete(&t, 1e-4)?;
        Ok((0..10_000).fold(0.0f64, |m, _| m.max((lp.step(1.0) - reference.step(1.0)).abs())))
    });
    out.push(check(S, "explicit loop step response", step_err.unwrap_or(f64::INFINITY), 1e-6));

    let cascade = synthesize_feedforward(&gains).map(|ff| (&ff * &t).minreal());
    let target = RationalTF::new(Poly::constant(1.0), Poly::linear(gains.tau_forward, 1.0).pow(2));
    out.push(flag(
        S,
        "T_fwd·T = 1/(τ_f s+1)²",
        cascade.map(|c| c.approx_eq(&target, 1e-9)).unwrap_or(false),
        "",
    ));

    // DC projector at the scenario-1 target linearization
    let params = EihParameters::default();
    let cfg = ScenarioConfig::scenario1(crate::sim::Mode::FeedbackOnly);
    let q_target = match cfg.target {
        crate::sim::TargetSpec::Joints(q) => q,
        crate::sim::TargetSpec::Pose(_) => unreachable!("builtin targets are joints"),
    };
    let projector = eih_jacobian(&params, &q_target, &cfg.markers)
        .and_then(|j| synthesize_outer(&j, &gains))
        .and_then(|s| s.t_y(Complex::new(0.0, 0.0)));
    match projector {
        Ok(p) => {
            let p = p.map(|c| c.re);
            let sym = (&p - p.transpose()).amax();
            let idem = (&p * &p - &p).amax();
            let rank = p.trace();
            out.push(check(S, "T_y(0) symmetric idempotent", sym.max(idem), 1e-9));
            out.push(check(S, "T_y(0) rank 6", (rank - 6.0).abs(), 1e-9));
        }
        Err(e) => out.push(flag(S, "T_y(0) projector", false, e.to_string())),
    }
    out
}

pub fn run_suite(suite: Suite) -> Vec<CheckResult> {
    match suite {
        Suite::Kinematics => kinematics_suite(),
        Suite::Camera => camera_suite(),
        Suite::Control => control_suite(),
        Suite::All => [kinematics_suite(), camera_suite(), control_suite()].concat(),
    }
}
