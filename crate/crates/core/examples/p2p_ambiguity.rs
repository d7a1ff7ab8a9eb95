//! Two markers do not fix the camera: rotating it about the line through
//! them leaves their images unchanged. The third marker breaks the tie.

use std::f64::consts::PI;

use servo_forge::eye_in_hand::p2p_pose_family;
use servo_forge::se3::Point3;
use servo_forge::stereo::{project, CameraIntrinsics};

fn features(intr: &CameraIntrinsics, pts: &[Point3]) -> servo_forge::Result<Vec<f64>> {
    let mut f = Vec::new();
    for p in pts {
        f.extend(project(intr, &(p * 1000.0))?.to_array());
    }
    Ok(f)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `(worst two-marker feature change, smallest three-marker change)` over
/// the family members, mm.
pub fn run_example() -> servo_forge::Result<(f64, f64)> {
    let intr = CameraIntrinsics::default();
    // marker positions in the camera frame, meters
    let (p1, p2, p3) = (Point3::new(-0.3, 0.1, 1.5), Point3::new(0.25, -0.05, 1.8), Point3::new(0.05, 0.35, 1.6));
    let base2 = features(&intr, &[p1, p2])?;
    let base3 = features(&intr, &[p1, p2, p3])?;

    let (mut same, mut separated) = (0.0f64, f64::INFINITY);
    for k in 1..8 {
        let angle = 2.0 * PI * k as f64 / 8.0 * 0.1;
        // member pose relative to the original camera; map points into its frame
        let to_member = p2p_pose_family(&p1, &p2, angle)?.inverse();
        let moved: Vec<Point3> = [p1, p2, p3].iter().map(|p| to_member.transform_point(p)).collect();
        let d2 = max_diff(&features(&intr, &moved[..2])?, &base2);
        let d3 = max_diff(&features(&intr, &moved)?, &base3);
        println!("rotation {:6.2}°: two-marker change {:.1e} mm, three-marker change {:.3e} mm", angle.to_degrees(), d2, d3);
        same = same.max(d2);
        separated = separated.min(d3);
    }
    Ok((same, separated))
}

fn main() -> servo_forge::Result<()> {
    let (same, sep) = run_example()?;
    println!("two markers: {same:.1e} mm; third marker separates by ≥ {sep:.3e} mm");
    Ok(())
}
