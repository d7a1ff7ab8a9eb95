//! Eye-in-hand: image features of the three markers at a joint
//! configuration, then the camera pose and joints recovered from them.

use servo_forge::eye_in_hand::{eih_map, estimate_joints, pose_from_features, EihParameters, MarkerSet};
use servo_forge::kinematics::JointVector;

/// Joint recovery error (rad).
pub fn run_example() -> servo_forge::Result<f64> {
    let params = EihParameters::default();
    let markers = MarkerSet::default();
    let q = JointVector::from_iterator([0.48, 2.21, 2.05, -82.68, 9.46, 77.47].iter().map(|d: &f64| d.to_radians()));

    let f = eih_map(&params, &q, &markers)?;
    for (i, t) in f.as_slice().chunks(3).enumerate() {
        println!("marker {}: u_l {:+.5} u_r {:+.5} v {:+.5} mm", i + 1, t[0], t[1], t[2]);
    }
    let cam = pose_from_features(&params.intr, &f, &markers)?;
    let tool = params.tool_pose(&cam);
    println!("camera centre ({:.4}, {:.4}, {:.4}) m", cam.translation.x, cam.translation.y, cam.translation.z);
    println!("tool pose rows {:.4?}", tool.to_rows());

    let back = estimate_joints(&params, &f, &markers)?;
    Ok((back - q).amax())
}

fn main() -> servo_forge::Result<()> {
    println!("joint recovery error {:.2e} rad", run_example()?);
    Ok(())
}
