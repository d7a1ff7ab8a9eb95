//! Hand-eye geometry: measure the marker-to-camera transform at several
//! stations and check the AX = XB motion pairs against the true mount.

use servo_forge::eye_in_hand::{EihParameters, MarkerSet};
use servo_forge::hand_eye::{build_marker_frame_facing_camera, marker_to_camera, motion_pair, synthesize_marker_features};
use servo_forge::kinematics::{forward_kinematics, JointVector};
use servo_forge::se3::Point3;

/// Largest `‖AX − XB‖` over consecutive station pairs.
pub fn run_example() -> servo_forge::Result<f64> {
    let params = EihParameters::default();
    let [p1, p2, p3] = *MarkerSet::default().points();
    let frame = build_marker_frame_facing_camera(&p1, &p2, &p3)?;
    let local: [Point3; 3] = [frame.to_local(&p1), frame.to_local(&p2), frame.to_local(&p3)];
    let x = params.t_ec.inverse();

    let stations = [
        [0.48, 2.21, 2.05, -82.68, 9.46, 77.47],
        [3.0, 5.0, 0.0, -80.0, 12.0, 70.0],
        [-2.0, 0.0, 4.0, -85.0, 7.0, 80.0],
    ]
    .map(|d| JointVector::from_iterator(d.iter().map(|v: &f64| v.to_radians())));

    let mut measured = Vec::new();
    for q in &stations {
        // true marker -> camera map at this station, then a stereo measurement of it
        let truth = params.camera_pose(q).inverse().compose(&frame.pose());
        let f = synthesize_marker_features(&params.intr, &truth, &local)?;
        let tmc = marker_to_camera(&params.intr, &f, &local)?;
        println!("station {:?}: T_M^C error {:.1e}", measured.len() + 1, tmc.max_abs_diff(&truth));
        measured.push((forward_kinematics(&params.geom, q), tmc));
    }

    let mut worst = 0.0f64;
    for w in measured.windows(2) {
        let pair = motion_pair(&w[0].0, &w[1].0, &w[0].1, &w[1].1);
        println!(
            "tool rotates {:.3}°, camera {:.3}°, residual {:.1e}",
            pair.a.rotation_angle().to_degrees(),
            pair.b.rotation_angle().to_degrees(),
            pair.residual(&x)
        );
        worst = worst.max(pair.residual(&x));
    }
    Ok(worst)
}

fn main() -> servo_forge::Result<()> {
    println!("worst AX = XB residual {:.2e}", run_example()?);
    Ok(())
}
