//! Forward kinematics at home and at the scenario targets, back through the
//! closed-form inverse, plus a joint-limit check.

use servo_forge::kinematics::{check_limits, forward_kinematics, inverse_kinematics, JointVector, RobotGeometry};

fn deg(v: [f64; 6]) -> JointVector {
    JointVector::from_iterator(v.iter().map(|d| d.to_radians()))
}

/// Largest IK∘FK joint error (rad) over the sample configurations.
pub fn run_example() -> servo_forge::Result<f64> {
    let geom = RobotGeometry::default();
    let samples = [
        deg([0.0; 6]),
        deg([0.48, 2.21, 2.05, -82.68, 9.46, 77.47]),
        deg([14.0, 20.0, -10.0, 30.0, 45.0, -60.0]),
    ];
    let mut worst = 0.0f64;
    for q in &samples {
        let pose = forward_kinematics(&geom, q);
        let back = inverse_kinematics(&geom, &pose)?;
        let t = pose.translation;
        println!("q = {:?}°", q.iter().map(|v| (v.to_degrees() * 100.0).round() / 100.0).collect::<Vec<_>>());
        println!("  tool at ({:.4}, {:.4}, {:.4}) m, approach {:?}", t.x, t.y, t.z, pose.rotation.column(2).as_slice());
        worst = worst.max((back - q).amax());
    }

    let mut over = JointVector::zeros();
    over[1] = 160f64.to_radians();
    for v in check_limits(&geom, &over) {
        println!("axis {} at {:.1}° outside [{:.0}°, {:.0}°]", v.axis + 1, v.value.to_degrees(), v.min.to_degrees(), v.max.to_degrees());
    }
    Ok(worst)
}

fn main() -> servo_forge::Result<()> {
    println!("worst IK∘FK error {:.2e} rad", run_example()?);
    Ok(())
}
