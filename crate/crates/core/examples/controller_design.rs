//! Inner, feedforward and outer controller synthesis with the default gains.

use nalgebra::Complex;
use servo_forge::control::{
    channel_dynamics, inner_closed_loop, outer_target, synthesize_feedforward, synthesize_inner, synthesize_outer, ControllerGains,
};
use servo_forge::eye_in_hand::{eih_jacobian, EihParameters, MarkerSet};
use servo_forge::kinematics::JointVector;

/// `(‖T_y(0)² − T_y(0)‖, trace T_y(0))` at the scenario-1 target.
pub fn run_example() -> servo_forge::Result<(f64, f64)> {
    let gains = ControllerGains::default();
    let inner = synthesize_inner(&gains)?;
    println!("T      = {:?}", inner_closed_loop(gains.tau_in));
    println!("Gc     = {:?}", inner.gc);
    println!("T_fwd  = {:?}", synthesize_feedforward(&gains)?);
    println!("h      = {:?}", channel_dynamics(&gains));
    for p in outer_target(&gains).poles() {
        println!("  outer target pole {:.4} {:+.4}i", p.re, p.im);
    }

    let params = EihParameters::default();
    let q = JointVector::from_iterator([0.48, 2.21, 2.05, -82.68, 9.46, 77.47].iter().map(|d: &f64| d.to_radians()));
    let j = eih_jacobian(&params, &q, &MarkerSet::default())?;
    let outer = synthesize_outer(&j, &gains)?;
    println!("singular values {}", outer.sigma.iter().map(|s| format!("{s:.4e}")).collect::<Vec<_>>().join(" "));

    let p = outer.t_y(Complex::new(0.0, 0.0))?.map(|c| c.re);
    Ok(((&p * &p - &p).amax(), p.trace()))
}

fn main() -> servo_forge::Result<()> {
    let (idem, rank) = run_example()?;
    println!("T_y(0): idempotency error {idem:.1e}, trace {rank:.6}");
    Ok(())
}
