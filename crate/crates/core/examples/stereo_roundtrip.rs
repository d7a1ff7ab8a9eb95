//! Project a few points through the stereo pair and triangulate them back.

use servo_forge::se3::Point3;
use servo_forge::stereo::{project, triangulate, CameraIntrinsics};

/// Worst relative round-trip error over the sample points.
pub fn run_example() -> servo_forge::Result<f64> {
    let intr = CameraIntrinsics::default();
    let points = [
        Point3::new(0.0, 0.0, 1000.0),
        Point3::new(-350.0, 120.0, 1800.0),
        Point3::new(900.0, -400.0, 6000.0),
        Point3::new(20.0, 2500.0, 24_000.0),
    ];
    let mut worst = 0.0f64;
    for p in &points {
        let t = project(&intr, p)?;
        let back = triangulate(&intr, &t)?;
        let rel = (back - p).norm() / p.coords.norm();
        println!(
            "({:8.1}, {:8.1}, {:8.1}) mm -> u_l {:+.5} u_r {:+.5} v {:+.5} (disparity {:.5}) -> err {:.1e}",
            p.x, p.y, p.z, t.u_l, t.u_r, t.v, t.disparity(), rel
        );
        worst = worst.max(rel);
    }
    Ok(worst)
}

fn main() -> servo_forge::Result<()> {
    let worst = run_example()?;
    println!("worst relative error {worst:.2e}");
    Ok(())
}
