//! Eye-in-hand mapping: joint angles → nine stereo image coordinates of three
//! fixed markers, its finite-difference Jacobian, and the inverse through
//! three-point pose recovery.

use nalgebra::{Matrix3, SMatrix, SVector, Unit, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{
    forward_kinematics, inverse_kinematics, inverse_kinematics_near, JointVector, RobotGeometry,
};
use crate::se3::{check_non_collinear, rigid_register, Point3, Pose};
use crate::stereo::{project, triangulate, CameraIntrinsics, ImageTriplet};

/// `[u_l, u_r, v]` of markers 1, 2, 3 in that order, millimeters.
pub type FeatureVector = SVector<f64, 9>;

/// 9×6 image Jacobian, mm/rad.
pub type ImageJacobian = SMatrix<f64, 9, 6>;

/// Central-difference step for [`eih_jacobian`], radians.
pub const JACOBIAN_STEP: f64 = 1e-6;

const M_TO_MM: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkerSet {
    points: [Point3; 3],
}

impl Default for MarkerSet {
    fn default() -> Self {
        Self {
            points: [
                Point3::new(-0.5, 0.0, 0.0),
                Point3::new(0.0, 0.0, 0.5),
                Point3::new(2.0, -2.0, 0.0),
            ],
        }
    }
}

impl MarkerSet {
    pub fn new(points: [Point3; 3]) -> Result<Self> {
        if points.iter().any(|p| !p.coords.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidConfig("marker coordinates must be finite".into()));
        }
        check_non_collinear(&points)?;
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point3; 3] {
        &self.points
    }

    /// Unit normal `(P2 − P1) × (P3 − P1)` of the marker plane.
    pub fn normal(&self) -> Vector3<f64> {
        let [p1, p2, p3] = self.points;
        (p2 - p1).cross(&(p3 - p1)).normalize()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EihParameters {
    pub intr: CameraIntrinsics,
    pub geom: RobotGeometry,
    /// Point map from end-effector to camera coordinates, `P^C = t_ec·P^E`.
    pub t_ec: Pose,
}

impl Default for EihParameters {
    fn default() -> Self {
        Self {
            intr: CameraIntrinsics::default(),
            geom: RobotGeometry::default(),
            t_ec: default_t_ec(),
        }
    }
}

/// Camera mounted at the tool origin looking along the tool `n` axis, with
/// image x along `s` and image y along `a`.
pub fn default_t_ec() -> Pose {
    Pose::from_rotation(Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0))
}

impl EihParameters {
    /// Camera frame pose in the base frame at `q`.
    pub fn camera_pose(&self, q: &JointVector) -> Pose {
        forward_kinematics(&self.geom, q).compose(&self.t_ec.inverse())
    }

    /// Tool pose corresponding to a camera pose.
    pub fn tool_pose(&self, camera_pose: &Pose) -> Pose {
        camera_pose.compose(&self.t_ec)
    }
}

/// `P^C = T_E^C · T_0^6(q) · P^O`, meters.
pub fn robot_to_camera(params: &EihParameters, q: &JointVector, p: &Point3) -> Point3 {
    params.camera_pose(q).inverse().transform_point(p)
}

fn project_markers(intr: &CameraIntrinsics, world_to_cam: &Pose, markers: &MarkerSet) -> Result<FeatureVector> {
    let mut f = FeatureVector::zeros();
    for (i, p) in markers.points.iter().enumerate() {
        let pc = world_to_cam.transform_point(p) * M_TO_MM;
        let t = project(intr, &pc).map_err(|_| Error::MarkerBehindCamera(i + 1))?;
        f.fixed_rows_mut::<3>(3 * i).copy_from_slice(&t.to_array());
    }
    Ok(f)
}

/// Features seen from an arbitrary camera pose in the base frame.
pub fn features_from_camera_pose(
    intr: &CameraIntrinsics,
    camera_pose: &Pose,
    markers: &MarkerSet,
) -> Result<FeatureVector> {
    project_markers(intr, &camera_pose.inverse(), markers)
}

/// Eye-in-hand map `F(q)`. Fails with [`Error::MarkerBehindCamera`] (1-based
/// index) when a marker has non-positive depth.
pub fn eih_map(params: &EihParameters, q: &JointVector, markers: &MarkerSet) -> Result<FeatureVector> {
    features_from_camera_pose(&params.intr, &params.camera_pose(q), markers)
}

/// Central-difference Jacobian of [`eih_map`] with step [`JACOBIAN_STEP`].
pub fn eih_jacobian(params: &EihParameters, q: &JointVector, markers: &MarkerSet) -> Result<ImageJacobian> {
    eih_jacobian_with_step(params, q, markers, JACOBIAN_STEP)
}

pub fn eih_jacobian_with_step(
    params: &EihParameters,
    q: &JointVector,
    markers: &MarkerSet,
    h: f64,
) -> Result<ImageJacobian> {
    let mut j = ImageJacobian::zeros();
    for i in 0..6 {
        let mut qp = *q;
        let mut qm = *q;
        qp[i] += h;
        qm[i] -= h;
        let col = (eih_map(params, &qp, markers)? - eih_map(params, &qm, markers)?) / (2.0 * h);
        j.set_column(i, &col);
    }
    Ok(j)
}

/// Marker positions in the camera frame (meters) recovered by triangulation.
pub fn triangulate_features(intr: &CameraIntrinsics, f: &FeatureVector) -> Result<[Point3; 3]> {
    let mut out = [Point3::origin(); 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let t = ImageTriplet::new(f[3 * i], f[3 * i + 1], f[3 * i + 2]);
        *slot = triangulate(intr, &t)? / M_TO_MM;
    }
    Ok(out)
}

/// Camera pose in the base frame from one stereo view of three known markers.
pub fn pose_from_features(intr: &CameraIntrinsics, f: &FeatureVector, markers: &MarkerSet) -> Result<Pose> {
    let in_camera = triangulate_features(intr, f)?;
    let world_to_cam = rigid_register(&markers.points, &in_camera)?;
    Ok(world_to_cam.inverse())
}

/// `F⁻¹`: principal-branch joint angles that produce the features.
pub fn estimate_joints(params: &EihParameters, f: &FeatureVector, markers: &MarkerSet) -> Result<JointVector> {
    let cam = pose_from_features(&params.intr, f, markers)?;
    inverse_kinematics(&params.geom, &params.tool_pose(&cam))
}

/// `F⁻¹` on the IK branch closest to `hint` (see [`inverse_kinematics_near`]).
pub fn estimate_joints_near(
    params: &EihParameters,
    f: &FeatureVector,
    markers: &MarkerSet,
    hint: &JointVector,
) -> Result<JointVector> {
    let cam = pose_from_features(&params.intr, f, markers)?;
    inverse_kinematics_near(&params.geom, &params.tool_pose(&cam), hint)
}

/// Two-point ambiguity family.
///
/// With only two markers at camera-frame positions `p1`, `p2`, every rotation
/// of the camera about the line through them leaves both camera-frame
/// coordinates unchanged; the camera centre sweeps a circle around the line
/// whose radius is the height of the triangle (origin, p1, p2) over the base
/// `|p2 − p1|`. Returns the member at `angle` as a pose relative to the
/// original camera frame (`angle = 0` is the identity).
pub fn p2p_pose_family(p1: &Point3, p2: &Point3, angle: f64) -> Result<Pose> {
    let axis = p2 - p1;
    if axis.norm() <= f64::EPSILON * p1.coords.norm().max(p2.coords.norm()).max(1.0) {
        return Err(Error::CoincidentPoints);
    }
    let rot = UnitQuaternion::from_axis_angle(&Unit::new_normalize(axis), angle)
        .to_rotation_matrix()
        .into_inner();
    Ok(Pose::new(rot, p1.coords - rot * p1.coords))
}

/// Radius of the circle swept by the camera centre in [`p2p_pose_family`].
pub fn p2p_circle_radius(p1: &Point3, p2: &Point3) -> f64 {
    let base = p2 - p1;
    p1.coords.cross(&base).norm() / base.norm()
}
