//! Hand-eye calibration data: marker frames, marker-to-camera transforms
//! from stereo features, and `(A, B)` motion pairs for `A·X = X·B`.
//!
//! Solving `A·X = X·B` is left to a dedicated solver; this module builds and
//! validates its inputs.

use nalgebra::{Matrix3, SVector};

use crate::error::{Error, Result};
use crate::se3::{check_non_collinear, rigid_register, Point3, Pose};
use crate::stereo::{project, triangulate, CameraIntrinsics, ImageTriplet};

const M_TO_MM: f64 = 1000.0;

/// Marker coordinate frame: origin at marker 1, X toward marker 2, Z normal
/// to the marker plane, `Y = Z × X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkerFrame {
    pub origin: Point3,
    /// Columns are the X, Y, Z axes.
    pub axes: Matrix3<f64>,
}

impl MarkerFrame {
    /// Frame pose in the coordinates the points were given in.
    pub fn pose(&self) -> Pose {
        Pose::new(self.axes, self.origin.coords)
    }

    /// Coordinates of `p` in this frame.
    pub fn to_local(&self, p: &Point3) -> Point3 {
        self.pose().inverse().transform_point(p)
    }
}

/// Right-handed marker frame with `Z ∝ (p2 − p1) × (p3 − p1)`.
pub fn build_marker_frame(p1: &Point3, p2: &Point3, p3: &Point3) -> Result<MarkerFrame> {
    check_non_collinear(&[*p1, *p2, *p3])?;
    let x = (p2 - p1).normalize();
    let z = (p2 - p1).cross(&(p3 - p1)).normalize();
    let y = z.cross(&x);
    Ok(MarkerFrame { origin: *p1, axes: Matrix3::from_columns(&[x, y, z]) })
}

/// Marker frame for points given in camera coordinates, with Z flipped (and Y
/// with it) so that it points toward the camera centre.
pub fn build_marker_frame_facing_camera(p1: &Point3, p2: &Point3, p3: &Point3) -> Result<MarkerFrame> {
    let mut frame = build_marker_frame(p1, p2, p3)?;
    let centroid = (p1.coords + p2.coords + p3.coords) / 3.0;
    if frame.axes.column(2).dot(&-centroid) < 0.0 {
        frame.axes.column_mut(1).neg_mut();
        frame.axes.column_mut(2).neg_mut();
    }
    Ok(frame)
}

/// Stereo features of marker points (meters, marker frame) seen through `tmc`.
pub fn synthesize_marker_features(
    intr: &CameraIntrinsics,
    tmc: &Pose,
    marker_local: &[Point3; 3],
) -> Result<SVector<f64, 9>> {
    let mut f = SVector::<f64, 9>::zeros();
    for (i, p) in marker_local.iter().enumerate() {
        let t = project(intr, &(tmc.transform_point(p) * M_TO_MM))
            .map_err(|_| Error::MarkerBehindCamera(i + 1))?;
        f.fixed_rows_mut::<3>(3 * i).copy_from_slice(&t.to_array());
    }
    Ok(f)
}

/// `T_M^C`, the point map from marker to camera coordinates, from one stereo
/// view of three marker points with known marker-frame coordinates (meters).
pub fn marker_to_camera(
    intr: &CameraIntrinsics,
    features: &SVector<f64, 9>,
    marker_local: &[Point3; 3],
) -> Result<Pose> {
    let mut in_camera = [Point3::origin(); 3];
    for (i, slot) in in_camera.iter_mut().enumerate() {
        let t = ImageTriplet::new(features[3 * i], features[3 * i + 1], features[3 * i + 2]);
        *slot = triangulate(intr, &t)? / M_TO_MM;
    }
    rigid_register(marker_local, &in_camera)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionPair {
    /// Relative tool motion between stations i and j.
    pub a: Pose,
    /// Relative camera motion between the same stations, seen from the marker.
    pub b: Pose,
}

impl MotionPair {
    /// `‖A·X − X·B‖_F` over the homogeneous matrices.
    pub fn residual(&self, x: &Pose) -> f64 {
        (self.a.compose(x).to_matrix() - x.compose(&self.b).to_matrix()).norm()
    }
}

/// Motion pair from two stations.
///
/// `tool_i`, `tool_j` are tool poses in the base frame (forward kinematics);
/// `tmc_i`, `tmc_j` are the marker-to-camera point maps measured there. Then
/// `A = tool_i⁻¹·tool_j` and `B = tmc_i·tmc_j⁻¹` satisfy `A·X = X·B` for `X`
/// the camera pose in the tool frame.
pub fn motion_pair(tool_i: &Pose, tool_j: &Pose, tmc_i: &Pose, tmc_j: &Pose) -> MotionPair {
    MotionPair {
        a: tool_i.inverse().compose(tool_j),
        b: tmc_i.compose(&tmc_j.inverse()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    #[test]
    fn canonical_frame() {
        let f = build_marker_frame(
            &Point3::new(0.0, 0.0, 0.0),
            &Point3::new(1.0, 0.0, 0.0),
            &Point3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        assert_eq!(f.axes, Matrix3::identity());
        assert_eq!(f.origin, Point3::origin());
    }

    #[test]
    fn frame_is_equivariant() {
        let pts = [Point3::new(0.1, 0.2, 0.0), Point3::new(0.5, -0.3, 0.2), Point3::new(-0.2, 0.4, 0.7)];
        let t = Pose::axis_angle(&Vector3::new(1.0, 2.0, -0.5), 0.8).compose(&Pose::from_translation(0.3, -1.0, 2.0));
        let f = build_marker_frame(&pts[0], &pts[1], &pts[2]).unwrap();
        let moved = pts.map(|p| t.transform_point(&p));
        let g = build_marker_frame(&moved[0], &moved[1], &moved[2]).unwrap();
        assert!(g.pose().max_abs_diff(&t.compose(&f.pose())) < 1e-12);
    }

    #[test]
    fn facing_flips_toward_camera() {
        // marker plane z = 2 m, points ordered so the raw normal is +z (away)
        let f = build_marker_frame_facing_camera(
            &Point3::new(0.0, 0.0, 2.0),
            &Point3::new(0.1, 0.0, 2.0),
            &Point3::new(0.0, 0.1, 2.0),
        )
        .unwrap();
        assert_eq!(f.axes.column(2).into_owned(), Vector3::new(0.0, 0.0, -1.0));
        assert!((f.axes.determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_rejected() {
        let r = build_marker_frame(
            &Point3::new(0.0, 0.0, 0.0),
            &Point3::new(1.0, 0.0, 0.0),
            &Point3::new(2.0, 0.0, 0.0),
        );
        assert!(matches!(r, Err(Error::CollinearPoints)));
        let local = [Point3::new(0.0, 0.0, 1.0), Point3::new(0.1, 0.0, 1.0), Point3::new(0.2, 0.0, 1.0)];
        let f = synthesize_marker_features(&CameraIntrinsics::default(), &Pose::identity(), &local).unwrap();
        assert!(matches!(
            marker_to_camera(&CameraIntrinsics::default(), &f, &local),
            Err(Error::CollinearPoints)
        ));
    }

    #[test]
    fn recovers_identity_and_known_transform() {
        let intr = CameraIntrinsics::default();
        let local = [Point3::new(0.0, 0.0, 1.0), Point3::new(0.2, 0.0, 1.2), Point3::new(0.0, 0.3, 1.1)];
        let f = synthesize_marker_features(&intr, &Pose::identity(), &local).unwrap();
        assert!(marker_to_camera(&intr, &f, &local).unwrap().max_abs_diff(&Pose::identity()) < 1e-9);

        let planar = [Point3::new(0.0, 0.0, 0.0), Point3::new(0.2, 0.0, 0.0), Point3::new(0.0, 0.3, 0.0)];
        let tmc = Pose::rot_z(30f64.to_radians()).compose(&Pose::identity());
        let tmc = Pose::new(tmc.rotation, Vector3::new(0.1, 0.0, 1.5));
        let f = synthesize_marker_features(&intr, &tmc, &planar).unwrap();
        assert!(marker_to_camera(&intr, &f, &planar).unwrap().max_abs_diff(&tmc) < 1e-9);
    }

    #[test]
    fn same_station_gives_identity_pair() {
        let tool = Pose::rot_x(0.4).compose(&Pose::from_translation(1.0, 0.2, 0.3));
        let tmc = Pose::rot_y(-0.2).compose(&Pose::from_translation(0.0, 0.1, 2.0));
        let pair = motion_pair(&tool, &tool, &tmc, &tmc);
        assert!(pair.a.max_abs_diff(&Pose::identity()) < 1e-12);
        assert!(pair.b.max_abs_diff(&Pose::identity()) < 1e-12);
    }
}
