//! Forward and inverse kinematics of a six-axis elbow manipulator with a
//! spherical wrist (ABB IRB 4600 45/2.05 geometry by default).
//!
//! The DH chain is the ground truth. Its q = 0 configuration puts the tool
//! frame at `(a1 + L4 + Lt, 0, L1 + L2 + L3)` with `n = −z`, `s = y`,
//! `a = x`. In rotation terms the chain is
//! `R = Rz(q1)·Ry(q2+q3)·Rx(q4)·Ry(q5)·Rx(q6)·Ry(90°)`, which is what the
//! closed-form inverse exploits.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::se3::Pose;

/// Six joint angles, radians.
pub type JointVector = Vector6<f64>;

/// Slack on `|arccos argument| ≤ 1` before a pose is declared unreachable.
pub const REACH_TOL: f64 = 1e-12;

/// `|sin q5|` below which q4 and q6 are not separable.
pub const WRIST_SINGULAR_TOL: f64 = 1e-9;

/// Inclusive-boundary slack for [`check_limits`], radians.
const LIMIT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhRow {
    pub a: f64,
    pub alpha: f64,
    pub d: f64,
    pub theta_offset: f64,
}

impl DhRow {
    pub const fn new(a: f64, alpha: f64, d: f64, theta_offset: f64) -> Self {
        Self { a, alpha, d, theta_offset }
    }
}

/// Link transform `Rz(θ)·Tz(d)·Tx(a)·Rx(α)` with `θ = q + theta_offset`.
pub fn dh_transform(row: &DhRow, q: f64) -> Pose {
    let (st, ct) = (q + row.theta_offset).sin_cos();
    let (sa, ca) = row.alpha.sin_cos();
    Pose::new(
        Matrix3::new(ct, -st * ca, st * sa, st, ct * ca, -ct * sa, 0.0, sa, ca),
        Vector3::new(row.a * ct, row.a * st, row.d),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkLengths {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub l4: f64,
    pub a1: f64,
    pub lt: f64,
}

impl Default for LinkLengths {
    fn default() -> Self {
        Self { l1: 0.495, l2: 0.900, l3: 0.175, l4: 0.960, a1: 0.175, lt: 0.135 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotGeometry {
    pub dh: [DhRow; 6],
    pub lengths: LinkLengths,
    /// `[min, max]` per axis, radians.
    pub joint_limits: [[f64; 2]; 6],
}

impl Default for RobotGeometry {
    fn default() -> Self {
        let deg = f64::to_radians;
        Self::from_lengths(
            LinkLengths::default(),
            [
                [deg(-180.0), deg(180.0)],
                [deg(-90.0), deg(150.0)],
                [deg(-180.0), deg(75.0)],
                [deg(-400.0), deg(400.0)],
                [deg(-125.0), deg(120.0)],
                [deg(-400.0), deg(400.0)],
            ],
        )
        .expect("default geometry is valid")
    }
}

impl RobotGeometry {
    /// Builds the DH table for the given link lengths.
    pub fn from_lengths(lengths: LinkLengths, joint_limits: [[f64; 2]; 6]) -> Result<Self> {
        let LinkLengths { l1, l2, l3, l4, a1, lt } = lengths;
        for (name, v) in [("L1", l1), ("L2", l2), ("L3", l3), ("L4", l4), ("a1", a1), ("Lt", lt)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!("link length {name} must be positive, got {v}")));
            }
        }
        for (i, [lo, hi]) in joint_limits.iter().enumerate() {
            if !(lo <= hi) {
                return Err(Error::InvalidConfig(format!("joint {} limits are inverted", i + 1)));
            }
        }
        let dh = [
            DhRow::new(a1, -FRAC_PI_2, l1, 0.0),
            DhRow::new(l2, 0.0, 0.0, -FRAC_PI_2),
            DhRow::new(l3, -FRAC_PI_2, 0.0, 0.0),
            DhRow::new(0.0, FRAC_PI_2, l4, 0.0),
            DhRow::new(0.0, -FRAC_PI_2, 0.0, 0.0),
            DhRow::new(0.0, 0.0, lt, PI),
        ];
        Ok(Self { dh, lengths, joint_limits })
    }

    fn l34(&self) -> f64 {
        self.lengths.l3.hypot(self.lengths.l4)
    }

    /// Largest distance from the shoulder axis to the wrist centre.
    pub fn max_reach(&self) -> f64 {
        self.lengths.l2 + self.l34()
    }
}

/// Tool pose `T = A1·A2···A6` in the base frame.
pub fn forward_kinematics(geom: &RobotGeometry, q: &JointVector) -> Pose {
    geom.dh
        .iter()
        .zip(q.iter())
        .fold(Pose::identity(), |acc, (row, &qi)| acc.compose(&dh_transform(row, qi)))
}

/// Wrist centre `p = d − Lt·a` of a tool pose.
pub fn wrist_center(geom: &RobotGeometry, pose: &Pose) -> Vector3<f64> {
    pose.translation - geom.lengths.lt * pose.rotation.column(2)
}

fn ry(angle: f64) -> Matrix3<f64> {
    Pose::rot_y(angle).rotation
}

fn rz(angle: f64) -> Matrix3<f64> {
    Pose::rot_z(angle).rotation
}

/// Arm solution (q1, q2, q3) for a wrist centre, elbow-up branch.
fn arm_angles(geom: &RobotGeometry, p: &Vector3<f64>) -> Result<(f64, f64, f64)> {
    let LinkLengths { l1, l2, l3, l4, a1, .. } = geom.lengths;
    let l34 = geom.l34();
    let q1 = p.y.atan2(p.x);
    let r = p.x.hypot(p.y) - a1;
    let h = p.z - l1;
    let d2 = r * r + h * h;
    let d = d2.sqrt();
    if d == 0.0 {
        return Err(Error::Unreachable { reason: "wrist centre on the shoulder axis" });
    }
    let c_shoulder = (l2 * l2 + d2 - l34 * l34) / (2.0 * l2 * d);
    let c_elbow = (l2 * l2 + l34 * l34 - d2) / (2.0 * l2 * l34);
    if c_shoulder.abs() > 1.0 + REACH_TOL || c_elbow.abs() > 1.0 + REACH_TOL {
        return Err(Error::Unreachable { reason: "wrist centre outside the arm's reach" });
    }
    let q2 = FRAC_PI_2 - c_shoulder.clamp(-1.0, 1.0).acos() - h.atan2(r);
    let q3 = PI - c_elbow.clamp(-1.0, 1.0).acos() - l4.atan2(l3);
    Ok((q1, q2, q3))
}

/// Wrist rotation `W = Rx(q4)·Ry(q5)·Rx(q6)` left once the arm is removed.
fn wrist_matrix(pose: &Pose, q1: f64, q23: f64) -> Matrix3<f64> {
    ry(q23).transpose() * rz(q1).transpose() * pose.rotation * ry(FRAC_PI_2).transpose()
}

enum WristHint {
    Principal,
    Strict,
    Near(f64),
}

fn solve(geom: &RobotGeometry, pose: &Pose, hint: WristHint) -> Result<JointVector> {
    let p = wrist_center(geom, pose);
    let (q1, q2, q3) = arm_angles(geom, &p)?;
    let w = wrist_matrix(pose, q1, q2 + q3);

    let s5 = w[(1, 0)].hypot(w[(2, 0)]);
    let q5 = s5.atan2(w[(0, 0)]);
    let (q4, q6) = if s5 > WRIST_SINGULAR_TOL {
        (w[(1, 0)].atan2(-w[(2, 0)]), w[(0, 1)].atan2(w[(0, 2)]))
    } else {
        let q4 = match hint {
            WristHint::Strict => return Err(Error::SingularWrist { sin_q5: s5 }),
            WristHint::Principal => 0.0,
            WristHint::Near(q4) => q4,
        };
        // q5 = 0: W = Rx(q4 + q6); q5 = π: W = Rx(q4 − q6)·Ry(π)
        let combined = w[(2, 1)].atan2(w[(1, 1)]);
        if w[(0, 0)] > 0.0 {
            (q4, combined - q4)
        } else {
            (q4, q4 - combined)
        }
    };
    Ok(JointVector::new(q1, q2, q3, q4, q5, q6))
}

/// Closed-form inverse on the elbow-up, `q5 ≥ 0` branch.
///
/// At the wrist singularity (`sin q5 ≈ 0`) only `q4 ± q6` is defined; the
/// convention `q4 = 0` is used. See [`inverse_kinematics_strict`] for the
/// variant that reports the singularity instead.
pub fn inverse_kinematics(geom: &RobotGeometry, pose: &Pose) -> Result<JointVector> {
    solve(geom, pose, WristHint::Principal)
}

/// Like [`inverse_kinematics`] but fails with [`Error::SingularWrist`].
pub fn inverse_kinematics_strict(geom: &RobotGeometry, pose: &Pose) -> Result<JointVector> {
    solve(geom, pose, WristHint::Strict)
}

/// The solution closest to `hint` among the principal one, its wrist flip
/// `(q4 + π, −q5, q6 + π)` and the 2π shifts of q1, q4 and q6. At the wrist
/// singularity q4 is taken from the hint.
pub fn inverse_kinematics_near(
    geom: &RobotGeometry,
    pose: &Pose,
    hint: &JointVector,
) -> Result<JointVector> {
    let principal = solve(geom, pose, WristHint::Near(hint[3]))?;
    let mut flipped = principal;
    flipped[3] += PI;
    flipped[4] = -flipped[4];
    flipped[5] += PI;

    let best = [principal, flipped]
        .into_iter()
        .map(|mut q| {
            for i in [0, 3, 5] {
                q[i] = unwrap_near(q[i], hint[i]);
            }
            q
        })
        .min_by(|a, b| (a - hint).norm().total_cmp(&(b - hint).norm()))
        .expect("two candidates");
    Ok(best)
}

/// `angle + 2πk` closest to `reference`.
pub fn unwrap_near(angle: f64, reference: f64) -> f64 {
    angle + (2.0 * PI) * ((reference - angle) / (2.0 * PI)).round()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitViolation {
    /// Zero-based axis index.
    pub axis: usize,
    pub value: f64,
    pub min: f64,
    pub max: f64,
}

/// Axes outside their working range (bounds inclusive).
pub fn check_limits(geom: &RobotGeometry, q: &JointVector) -> Vec<LimitViolation> {
    geom.joint_limits
        .iter()
        .zip(q.iter())
        .enumerate()
        .filter(|(_, ([lo, hi], &v))| !(v >= lo - LIMIT_SLACK && v <= hi + LIMIT_SLACK))
        .map(|(axis, ([lo, hi], &v))| LimitViolation { axis, value: v, min: *lo, max: *hi })
        .collect()
}

/// Per-axis bounds of the configuration set on which [`inverse_kinematics`]
/// is a left inverse of [`forward_kinematics`]: joint limits shrunk by 5°,
/// `q3 ≤ 70°`, `q4, q6 ∈ [−175°, 175°]` and `q5 ∈ [5°, 115°]`.
pub fn safe_bounds(geom: &RobotGeometry) -> [[f64; 2]; 6] {
    let m = 5f64.to_radians();
    let mut b = geom.joint_limits.map(|[lo, hi]| [lo + m, hi - m]);
    b[2] = [b[2][0].max((-75f64).to_radians()), b[2][1].min(70f64.to_radians())];
    for i in [3, 5] {
        b[i] = [b[i][0].max(-175f64.to_radians()), b[i][1].min(175f64.to_radians())];
    }
    b[4] = [b[4][0].max(5f64.to_radians()), b[4][1].min(115f64.to_radians())];
    b
}

/// `q` lies inside [`safe_bounds`] with the wrist centre at least 5 cm in
/// front of the first axis offset.
pub fn is_safe_configuration(geom: &RobotGeometry, q: &JointVector) -> bool {
    let in_box = safe_bounds(geom).iter().zip(q.iter()).all(|([lo, hi], v)| (lo..=hi).contains(&v));
    let p = wrist_center(geom, &forward_kinematics(geom, q));
    // signed horizontal reach along the direction of axis 1
    let reach = p.x * q[0].cos() + p.y * q[0].sin();
    in_box && reach - geom.lengths.a1 >= 0.05
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn deg(v: [f64; 6]) -> JointVector {
        JointVector::from_iterator(v.iter().map(|d| d.to_radians()))
    }

    #[test]
    fn dh_identity_and_translation() {
        assert_eq!(dh_transform(&DhRow::new(0.0, 0.0, 0.0, 0.0), 0.0), Pose::identity());
        let t = dh_transform(&DhRow::new(1.0, 0.0, 0.0, 0.0), 0.0);
        assert!(t.max_abs_diff(&Pose::from_translation(1.0, 0.0, 0.0)) < 1e-15);
    }

    #[test]
    fn dh_twisted_row_by_hand() {
        let t = dh_transform(&DhRow::new(0.0, FRAC_PI_2, 0.5, 0.0), 30f64.to_radians());
        let (s, c) = (0.5, 3f64.sqrt() / 2.0);
        let expected = Pose::new(
            Matrix3::new(c, 0.0, s, s, 0.0, -c, 0.0, 1.0, 0.0),
            Vector3::new(0.0, 0.0, 0.5),
        );
        assert!(t.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn home_pose() {
        let g = RobotGeometry::default();
        let t = forward_kinematics(&g, &JointVector::zeros());
        let expected = Pose::new(
            Matrix3::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0),
            Vector3::new(1.27, 0.0, 1.57),
        );
        assert!(t.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn base_rotation_of_home() {
        let g = RobotGeometry::default();
        let t = forward_kinematics(&g, &deg([90.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
        assert_relative_eq!(t.translation, Vector3::new(0.0, 1.27, 1.57), epsilon = 1e-12);
    }

    #[test]
    fn rotation_factorization_matches_chain() {
        let g = RobotGeometry::default();
        let q = deg([12.0, -30.0, 41.0, 77.0, -20.0, 133.0]);
        let r = rz(q[0])
            * ry(q[1] + q[2])
            * Pose::rot_x(q[3]).rotation
            * ry(q[4])
            * Pose::rot_x(q[5]).rotation
            * ry(FRAC_PI_2);
        assert_relative_eq!(forward_kinematics(&g, &q).rotation, r, epsilon = 1e-12);
    }

    #[test]
    fn final_joints_reproduce_reference_pose() {
        let g = RobotGeometry::default();
        let t = forward_kinematics(&g, &deg([0.48, 2.21, 2.05, -82.68, 9.46, 77.47]));
        let reference = Pose::new(
            Matrix3::new(-0.11, 0.14, 0.98, -0.09, 0.98, -0.15, -0.99, -0.10, -0.09),
            Vector3::new(1.31, -0.01, 1.49),
        );
        assert!(t.max_abs_diff(&reference) < 0.006);
    }

    #[test]
    fn scenario_two_final_joints() {
        let g = RobotGeometry::default();
        let t = forward_kinematics(&g, &deg([45.0, 18.59, 4.35, 0.0, 67.06, -45.0]));
        assert!(t.is_valid());
        // the reference matrix has a misplaced entry; the rest agrees to rounding
        let expected = Pose::new(
            Matrix3::new(0.0, -1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, -1.0),
            Vector3::new(1.0, 1.0, 1.0),
        );
        assert!(t.max_abs_diff(&expected) < 0.01, "{t:?}");
    }

    #[test]
    fn ik_home_is_zero() {
        let g = RobotGeometry::default();
        let q = inverse_kinematics(&g, &forward_kinematics(&g, &JointVector::zeros())).unwrap();
        assert!(q.amax() < 1e-12, "{q}");
        assert!(matches!(
            inverse_kinematics_strict(&g, &forward_kinematics(&g, &JointVector::zeros())),
            Err(Error::SingularWrist { .. })
        ));
    }

    #[test]
    fn ik_out_of_reach() {
        let g = RobotGeometry::default();
        let far = Pose::from_translation(5.0, 0.0, 1.0);
        assert!(matches!(inverse_kinematics(&g, &far), Err(Error::Unreachable { .. })));
    }

    #[test]
    fn ik_near_picks_wrist_flip_and_unwraps() {
        let g = RobotGeometry::default();
        let q = deg([10.0, 20.0, -10.0, 30.0, -40.0, 200.0]);
        let t = forward_kinematics(&g, &q);
        let principal = inverse_kinematics(&g, &t).unwrap();
        assert!(principal[4] > 0.0);
        let near = inverse_kinematics_near(&g, &t, &q).unwrap();
        assert!((near - q).amax() < 1e-9, "{near} vs {q}");
    }

    #[test]
    fn ik_near_keeps_hint_at_singularity() {
        let g = RobotGeometry::default();
        let q = deg([5.0, 10.0, 5.0, 20.0, 0.0, -35.0]);
        let t = forward_kinematics(&g, &q);
        let near = inverse_kinematics_near(&g, &t, &q).unwrap();
        assert!((near - q).amax() < 1e-9);
    }

    #[test]
    fn limits() {
        let g = RobotGeometry::default();
        assert!(check_limits(&g, &JointVector::zeros()).is_empty());
        let v = check_limits(&g, &deg([0.0, 160.0, 0.0, 0.0, 0.0, 0.0]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].axis, 1);
        assert!(check_limits(&g, &deg([-180.0, 0.0, 0.0, 0.0, 0.0, 0.0])).is_empty());
    }

    #[test]
    fn rejects_bad_lengths() {
        let lengths = LinkLengths { l2: 0.0, ..LinkLengths::default() };
        assert!(RobotGeometry::from_lengths(lengths, RobotGeometry::default().joint_limits).is_err());
    }

    proptest! {
        #[test]
        fn periodic_in_each_axis(
            q in proptest::array::uniform6(-3.0..3.0f64),
            axis in 0usize..6,
        ) {
            let g = RobotGeometry::default();
            let q = JointVector::from(q);
            let mut shifted = q;
            shifted[axis] += 2.0 * PI;
            let d = forward_kinematics(&g, &q).max_abs_diff(&forward_kinematics(&g, &shifted));
            prop_assert!(d < 1e-12);
        }

        #[test]
        fn wrist_center_ignores_wrist_joints(
            q in proptest::array::uniform6(-3.0..3.0f64),
            w in proptest::array::uniform3(-3.0..3.0f64),
        ) {
            let g = RobotGeometry::default();
            let q = JointVector::from(q);
            let mut q2 = q;
            q2[3] = w[0];
            q2[4] = w[1];
            q2[5] = w[2];
            let p1 = wrist_center(&g, &forward_kinematics(&g, &q));
            let p2 = wrist_center(&g, &forward_kinematics(&g, &q2));
            prop_assert!((p1 - p2).amax() < 1e-12);
        }
    }
}
