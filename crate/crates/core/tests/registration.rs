mod common;

use common::rng;
use nalgebra::{Unit, UnitQuaternion, Vector3};
use proptest::prelude::*;
use rand::Rng;
use servo_forge::hand_eye::{
    build_marker_frame, build_marker_frame_facing_camera, marker_to_camera, motion_pair, synthesize_marker_features,
};
use servo_forge::se3::{rigid_register, Point3, Pose};
use servo_forge::stereo::CameraIntrinsics;

fn random_pose(r: &mut impl Rng, spread: f64) -> Pose {
    let axis = Unit::new_normalize(Vector3::new(
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
        r.random_range(-1.0..1.0),
    ));
    let rot = UnitQuaternion::from_axis_angle(&axis, r.random_range(-3.1..3.1)).to_rotation_matrix().into_inner();
    let t = Vector3::new(r.random_range(-spread..spread), r.random_range(-spread..spread), r.random_range(-spread..spread));
    Pose::new(rot, t)
}

fn random_triangle(r: &mut impl Rng) -> [Point3; 3] {
    loop {
        let pts = [(); 3].map(|_| Point3::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
        let area = (pts[1] - pts[0]).cross(&(pts[2] - pts[0])).norm();
        if area > 0.1 {
            return pts;
        }
    }
}

#[test]
fn recovers_random_transforms_from_three_points() {
    let mut r = rng(11);
    for _ in 0..100 {
        let truth = random_pose(&mut r, 5.0);
        let src = random_triangle(&mut r);
        let dst = src.map(|p| truth.transform_point(&p));
        let est = rigid_register(&src, &dst).unwrap();
        assert!((est.rotation - truth.rotation).norm() < 1e-9);
        assert!((est.translation - truth.translation).norm() < 1e-9);
    }
}

/// Marker-frame coordinates placed about 1.5 m in front of a camera posed by `tmc`.
fn marker_scene(r: &mut impl Rng) -> (Pose, [Point3; 3]) {
    let local = [Point3::new(0.0, 0.0, 0.0), Point3::new(0.4, 0.0, 0.0), Point3::new(0.1, 0.3, 0.0)];
    let tilt = UnitQuaternion::from_euler_angles(r.random_range(-0.5..0.5), r.random_range(-0.5..0.5), r.random_range(-3.1..3.1));
    let t = Vector3::new(r.random_range(-0.3..0.3), r.random_range(-0.3..0.3), r.random_range(1.0..3.0));
    (Pose::new(tilt.to_rotation_matrix().into_inner(), t), local)
}

#[test]
fn marker_to_camera_synthesize_then_recover() {
    let intr = CameraIntrinsics::default();
    let mut r = rng(12);
    for _ in 0..100 {
        let (truth, local) = marker_scene(&mut r);
        let f = synthesize_marker_features(&intr, &truth, &local).unwrap();
        let est = marker_to_camera(&intr, &f, &local).unwrap();
        assert!((est.rotation - truth.rotation).norm() < 1e-9);
        assert!((est.translation - truth.translation).norm() < 1e-9);
    }
}

#[test]
fn motion_pairs_satisfy_ax_xb_for_any_mount() {
    let intr = CameraIntrinsics::default();
    let mut r = rng(14);
    for _ in 0..20 {
        // camera pose in the tool frame, and a fixed marker frame in the world
        let x = random_pose(&mut r, 0.2);
        let (cam0, local) = marker_scene(&mut r);
        let marker_world = random_pose(&mut r, 2.0);
        let mut stations = Vec::new();
        for _ in 0..4 {
            // small camera moves around the first view keep the markers visible
            let jitter = Pose::axis_angle(&Vector3::new(r.random_range(-1.0..1.0), 1.0, 0.3), r.random_range(-0.1..0.1))
                .compose(&Pose::from_translation(r.random_range(-0.1..0.1), r.random_range(-0.1..0.1), 0.0));
            let tmc = jitter.compose(&cam0);
            let cam_world = marker_world.compose(&tmc.inverse());
            let tool = cam_world.compose(&x.inverse());
            let f = synthesize_marker_features(&intr, &tmc, &local).unwrap();
            stations.push((tool, marker_to_camera(&intr, &f, &local).unwrap()));
        }
        for i in 0..stations.len() {
            for j in 0..stations.len() {
                let pair = motion_pair(&stations[i].0, &stations[j].0, &stations[i].1, &stations[j].1);
                assert!(pair.residual(&x) < 1e-9, "residual {}", pair.residual(&x));
                assert!((pair.a.rotation_angle() - pair.b.rotation_angle()).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn facing_frame_points_at_the_camera() {
    let (p1, p2, p3) = (Point3::new(0.0, 0.0, 2.0), Point3::new(0.5, 0.0, 2.0), Point3::new(0.0, 0.5, 2.0));
    let plain = build_marker_frame(&p1, &p2, &p3).unwrap();
    let facing = build_marker_frame_facing_camera(&p1, &p2, &p3).unwrap();
    assert!(plain.axes.column(2)[2] > 0.0);
    assert!(facing.axes.column(2).dot(&(-p1.coords)) > 0.0);
}

fn point() -> impl Strategy<Value = Point3> {
    (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn pose() -> impl Strategy<Value = Pose> {
    (-3.0..3.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(
        |(angle, ax, ay, az, x, y, z)| {
            let axis = Vector3::new(ax, ay, az + 1.5);
            let p = Pose::axis_angle(&axis, angle);
            Pose::new(p.rotation, Vector3::new(x, y, z))
        },
    )
}

proptest! {
    #[test]
    fn registration_ignores_point_order(a in point(), b in point(), c in point(), t in pose()) {
        prop_assume!((b - a).cross(&(c - a)).norm() > 0.05);
        let src = [a, b, c];
        let dst = src.map(|p| t.transform_point(&p));
        let forward = rigid_register(&src, &dst).unwrap();
        let permuted = rigid_register(&[c, a, b], &[dst[2], dst[0], dst[1]]).unwrap();
        prop_assert!(forward.max_abs_diff(&permuted) < 1e-9);
    }

    #[test]
    fn registration_commutes_with_pre_composition(a in point(), b in point(), c in point(), t in pose(), g in pose()) {
        prop_assume!((b - a).cross(&(c - a)).norm() > 0.05);
        let src = [a, b, c];
        let dst = src.map(|p| t.transform_point(&p));
        let moved = dst.map(|p| g.transform_point(&p));
        let direct = rigid_register(&src, &moved).unwrap();
        let composed = g.compose(&rigid_register(&src, &dst).unwrap());
        prop_assert!(direct.max_abs_diff(&composed) < 1e-8);
    }

    #[test]
    fn registered_rotation_is_proper(a in point(), b in point(), c in point(), d in point()) {
        prop_assume!((b - a).cross(&(c - a)).norm() > 0.05);
        prop_assume!((c - b).cross(&(d - b)).norm() > 0.05);
        let p = rigid_register(&[a, b, c], &[b, c, d]).unwrap();
        prop_assert!((p.rotation.determinant() - 1.0).abs() < 1e-9);
        prop_assert!(p.orthonormality_error() < 1e-9);
    }
}
