//! Joint-level loop: Youla design for the feedback-linearized double
//! integrator, its feedforward inverse, and a discrete simulation of the
//! explicit `{Gc, 1/s²}` loop.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::discrete::{realize_discrete, StateSpaceD};
use super::poly::Poly;
use super::tf::RationalTF;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerGains {
    /// Inner-loop time constant, s.
    pub tau_in: f64,
    /// Feedforward filter time constant, s.
    pub tau_forward: f64,
    /// Outer-loop natural frequency, rad/s.
    pub omega_n: f64,
    /// Outer-loop damping ratio.
    pub zeta: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self { tau_in: 0.01, tau_forward: 0.001, omega_n: 10.0, zeta: 10.0 }
    }
}

impl ControllerGains {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tau_in > 0.0 && self.tau_in.is_finite()) {
            return bad(format!("tau_in must be positive, got {}", self.tau_in));
        }
        if !(self.tau_forward > 0.0 && self.tau_forward.is_finite()) {
            return bad(format!("tau_forward must be positive, got {}", self.tau_forward));
        }
        if !(self.omega_n > 0.0 && self.omega_n.is_finite()) {
            return bad(format!("omega_n must be positive, got {}", self.omega_n));
        }
        if !(1.0 / self.omega_n > self.tau_in) {
            return bad(format!(
                "outer loop must be slower than the inner loop (1/omega_n = {} <= tau_in = {})",
                1.0 / self.omega_n,
                self.tau_in
            ));
        }
        if !(self.zeta > 0.0 && self.zeta.is_finite()) {
            return bad(format!("zeta must be positive, got {}", self.zeta));
        }
        Ok(())
    }
}

/// `(τs + 1)³` with exact binomial coefficients.
pub fn cubic_lag(tau: f64) -> Poly {
    Poly::new(vec![1.0, 3.0 * tau, 3.0 * tau * tau, tau * tau * tau])
}

/// Joint plant after feedback linearization, `1/s²`.
pub fn joint_plant() -> RationalTF {
    RationalTF::integrator(2)
}

/// Complementary closed loop `T = (3τs + 1)/(τs + 1)³`; `T(0) = 1`,
/// `T′(0) = 0`.
pub fn inner_closed_loop(tau: f64) -> RationalTF {
    RationalTF::new(Poly::linear(3.0 * tau, 1.0), cubic_lag(tau))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerDesign {
    pub t: RationalTF,
    pub y: RationalTF,
    pub s: RationalTF,
    pub gc: RationalTF,
}

/// Youla design for `1/s²`: `Y = T·s²`, `S = 1 − T`, `Gc = Y/S` reduced to
/// `(3τs + 1)/(τ³s + 3τ²)`.
pub fn synthesize_inner(gains: &ControllerGains) -> Result<InnerDesign> {
    let tau = gains.tau_in;
    if !(tau > 0.0) {
        return Err(Error::InvalidConfig(format!("tau_in must be positive, got {tau}")));
    }
    let t = inner_closed_loop(tau);
    let y = RationalTF::new(&t.num * &Poly::monomial(2), t.den.clone());
    let s = &RationalTF::constant(1.0) - &t;
    let gc = (&y / &s).minreal();
    Ok(InnerDesign { t, y, s, gc })
}

/// Inverse of the inner loop with a double pole at `−1/τ_forward` for
/// properness: `(τ_in s + 1)³ / [(3τ_in s + 1)(τ_forward s + 1)²]`.
pub fn synthesize_feedforward(gains: &ControllerGains) -> Result<RationalTF> {
    let tf = gains.tau_forward;
    if !(tf > 0.0) {
        return Err(Error::InvalidConfig(format!("tau_forward must be positive, got {tf}")));
    }
    let tau = gains.tau_in;
    Ok(RationalTF::new(
        cubic_lag(tau),
        &Poly::linear(3.0 * tau, 1.0) * &Poly::linear(tf, 1.0).pow(2),
    ))
}

/// Explicit discrete joint loop: controller `Gc` around the plant `1/s²`,
/// each discretized on its own. The direct feedthrough of both blocks forms
/// an algebraic loop that is solved exactly at every step.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerLoop {
    pub controller: StateSpaceD,
    pub plant: StateSpaceD,
}

impl InnerLoop {
    pub fn new(gc: &RationalTF, dt: f64) -> Result<Self> {
        Ok(Self {
            controller: realize_discrete(gc, dt)?,
            plant: realize_discrete(&joint_plant(), dt)?,
        })
    }

    pub fn from_gains(gains: &ControllerGains, dt: f64) -> Result<Self> {
        Self::new(&synthesize_inner(gains)?.gc, dt)
    }

    /// Joint output for reference `r` at the current state.
    pub fn output(&self, r: f64) -> f64 {
        let (c, p) = (&self.controller, &self.plant);
        let yc0 = c.output(0.0);
        let yp0 = p.output(0.0);
        (yp0 + p.d * yc0 + p.d * c.d * r) / (1.0 + p.d * c.d)
    }

    /// Advances one sample; returns the joint output at the pre-update state.
    pub fn step(&mut self, r: f64) -> f64 {
        let y = self.output(r);
        let e = r - y;
        let u = self.controller.step(e);
        self.plant.advance(u);
        y
    }

    fn state(&self) -> DVector<f64> {
        let mut v = self.controller.x.clone().resize_vertically(self.controller.order() + self.plant.order(), 0.0);
        v.rows_mut(self.controller.order(), self.plant.order()).copy_from(&self.plant.x);
        v
    }

    fn set_state(&mut self, v: &DVector<f64>) {
        let nc = self.controller.order();
        self.controller.x.copy_from(&v.rows(0, nc));
        self.plant.x.copy_from(&v.rows(nc, self.plant.order()));
    }

    /// Puts the loop at rest with output `r` under constant reference `r`.
    pub fn settle_at(&mut self, r: f64) -> Result<()> {
        let n = self.controller.order() + self.plant.order();
        // closed-loop x⁺ = A·x + B·r assembled column by column
        let mut a = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut probe = self.clone();
            let mut e = DVector::zeros(n);
            e[j] = 1.0;
            probe.set_state(&e);
            probe.step(0.0);
            a.set_column(j, &probe.state());
        }
        let mut probe = self.clone();
        probe.set_state(&DVector::zeros(n));
        probe.step(1.0);
        let b = probe.state();
        let x = (DMatrix::identity(n, n) - a).lu().solve(&(b * r)).ok_or(Error::PoleHit)?;
        self.set_state(&x);
        Ok(())
    }
}
