//! Discrete-time realizations of scalar transfer functions.

use nalgebra::{DMatrix, DVector, RowDVector};

use super::tf::RationalTF;
use crate::error::{Error, Result};

/// `x⁺ = A·x + B·u`, `y = C·x + D·u`, sampled every `dt` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceD {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: RowDVector<f64>,
    pub d: f64,
    pub dt: f64,
    pub x: DVector<f64>,
}

impl StateSpaceD {
    pub fn order(&self) -> usize {
        self.x.len()
    }

    /// Output for input `u` at the current state, without advancing.
    pub fn output(&self, u: f64) -> f64 {
        self.c.dot(&self.x.transpose()) + self.d * u
    }

    /// Advances one sample and returns the output at the pre-update state.
    pub fn step(&mut self, u: f64) -> f64 {
        let y = self.output(u);
        self.advance(u);
        y
    }

    /// State update only.
    pub fn advance(&mut self, u: f64) {
        if self.x.is_empty() {
            return;
        }
        self.x = &self.a * &self.x + &self.b * u;
    }

    pub fn reset(&mut self) {
        self.x.fill(0.0);
    }

    /// Places the state at the equilibrium for a constant input `u`. Fails
    /// for blocks with a pole at `z = 1` (integrators).
    pub fn set_steady_state(&mut self, u: f64) -> Result<()> {
        if self.x.is_empty() {
            return Ok(());
        }
        let n = self.order();
        let lhs = DMatrix::identity(n, n) - &self.a;
        let x = lhs.lu().solve(&(&self.b * u)).ok_or(Error::PoleHit)?;
        self.x = x;
        Ok(())
    }

    /// Steady-state gain `C(I − A)⁻¹B + D`.
    pub fn dc_gain(&self) -> Result<f64> {
        let mut probe = self.clone();
        probe.set_steady_state(1.0)?;
        Ok(probe.output(1.0))
    }

    /// Spectral radius of `A`.
    pub fn spectral_radius(&self) -> f64 {
        if self.x.is_empty() {
            return 0.0;
        }
        self.a.complex_eigenvalues().iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Controllable-canonical realization of a proper `tf`, discretized with the
/// bilinear (Tustin) map at step `dt`.
pub fn realize_discrete(tf: &RationalTF, dt: f64) -> Result<StateSpaceD> {
    if !tf.is_proper() {
        return Err(Error::ImproperTF { num: tf.num.degree(), den: tf.den.degree() });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!("sample time must be positive, got {dt}")));
    }
    let n = tf.den.degree();
    let lead = tf.den.leading();
    // descending-power coefficients of the monic denominator and padded numerator
    let den: Vec<f64> = (0..=n).map(|k| tf.den.coeff(n - k) / lead).collect();
    let num: Vec<f64> = (0..=n).map(|k| tf.num.coeff(n - k) / lead).collect();
    let d = num[0];
    if n == 0 {
        return Ok(StateSpaceD {
            a: DMatrix::zeros(0, 0),
            b: DVector::zeros(0),
            c: RowDVector::zeros(0),
            d,
            dt,
            x: DVector::zeros(0),
        });
    }

    let mut a = DMatrix::zeros(n, n);
    for j in 0..n {
        a[(0, j)] = -den[j + 1];
    }
    for i in 1..n {
        a[(i, i - 1)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[0] = 1.0;
    let c = RowDVector::from_iterator(n, (0..n).map(|j| num[j + 1] - d * den[j + 1]));

    let h = dt / 2.0;
    let eye = DMatrix::<f64>::identity(n, n);
    let m = (&eye - &a * h).try_inverse().ok_or(Error::PoleHit)?;
    let ad = &m * (&eye + &a * h);
    let mb = &m * &b;
    let bd = &mb * dt;
    let cd = &c * &m;
    let dd = d + (&c * &mb)[0] * h;
    Ok(StateSpaceD { a: ad, b: bd, c: cd, d: dd, dt, x: DVector::zeros(n) })
}
