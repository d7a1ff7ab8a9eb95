//! Scalar rational transfer functions.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use crate::error::{Error, Result};

/// Relative tolerance for common-factor cancellation in [`RationalTF::minreal`].
pub const MINREAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalTF {
    pub num: Poly,
    pub den: Poly,
}

impl RationalTF {
    /// Panics if the denominator is the zero polynomial.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "transfer function with zero denominator");
        Self { num, den }
    }

    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Self {
        Self::new(Poly::new(num.to_vec()), Poly::new(den.to_vec()))
    }

    pub fn constant(k: f64) -> Self {
        Self::new(Poly::constant(k), Poly::constant(1.0))
    }

    /// `1/s^n`.
    pub fn integrator(n: usize) -> Self {
        Self::new(Poly::constant(1.0), Poly::monomial(n))
    }

    pub fn is_proper(&self) -> bool {
        self.num.degree() <= self.den.degree()
    }

    pub fn relative_degree(&self) -> isize {
        self.den.degree() as isize - self.num.degree() as isize
    }

    pub fn eval(&self, s: Complex<f64>) -> Result<Complex<f64>> {
        let d = self.den.eval(s);
        if d.norm() <= f64::EPSILON * self.den.norm_inf() * (1.0 + s.norm()).powi(self.den.degree() as i32) {
            return Err(Error::PoleHit);
        }
        Ok(self.num.eval(s) / d)
    }

    pub fn eval_real(&self, s: f64) -> Result<f64> {
        self.eval(Complex::new(s, 0.0)).map(|c| c.re)
    }

    pub fn dc_gain(&self) -> Result<f64> {
        self.eval_real(0.0)
    }

    /// Derivative `d/ds` as a transfer function.
    pub fn derivative(&self) -> RationalTF {
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        RationalTF::new(num, &self.den * &self.den)
    }

    /// Scales numerator and denominator so the denominator is monic.
    pub fn normalize(&self) -> RationalTF {
        let k = 1.0 / self.den.leading();
        RationalTF::new(self.num.scale(k), self.den.scale(k))
    }

    /// Cancels common factors of numerator and denominator.
    ///
    /// The GCD is computed with `s` rescaled so the denominator roots have
    /// unit geometric-mean magnitude, which keeps the Euclidean remainders
    /// well conditioned when time constants span several decades.
    pub fn minreal(&self) -> RationalTF {
        if self.num.is_zero() {
            return RationalTF::new(Poly::constant(0.0), Poly::constant(1.0));
        }
        let k = root_scale(&self.den);
        let (num_s, den_s) = (self.num.substitute_scale(k), self.den.substitute_scale(k));
        let num_s = num_s.scale(1.0 / num_s.norm_inf());
        let den_s = den_s.scale(1.0 / den_s.norm_inf());
        let g = num_s.gcd(&den_s, MINREAL_TOL);
        if g.degree() == 0 {
            return self.clone();
        }
        let g = g.substitute_scale(1.0 / k);
        let (num, _) = self.num.div_rem(&g);
        let (den, _) = self.den.div_rem(&g);
        RationalTF::new(num, den)
    }

    /// Poles (roots of the denominator).
    pub fn poles(&self) -> Vec<Complex<f64>> {
        roots(&self.den)
    }

    pub fn zeros(&self) -> Vec<Complex<f64>> {
        roots(&self.num)
    }

    /// `self·(1 + self)⁻¹`: unity negative-feedback closed loop.
    pub fn feedback_unity(&self) -> RationalTF {
        RationalTF::new(self.num.clone(), &self.den + &self.num)
    }

    /// Coefficient-wise agreement of the normalized forms.
    pub fn approx_eq(&self, other: &RationalTF, tol: f64) -> bool {
        let (a, b) = (self.normalize(), other.normalize());
        let close = |p: &Poly, q: &Poly| {
            let n = p.coeffs().len().max(q.coeffs().len());
            let scale = p.norm_inf().max(q.norm_inf()).max(1e-300);
            (0..n).all(|k| (p.coeff(k) - q.coeff(k)).abs() <= tol * scale)
        };
        close(&a.num, &b.num) && close(&a.den, &b.den)
    }
}

fn root_scale(p: &Poly) -> f64 {
    let c = p.coeffs();
    let lo = c.iter().position(|v| *v != 0.0).unwrap_or(0);
    let hi = p.degree();
    if hi == lo {
        return 1.0;
    }
    (c[lo].abs() / c[hi].abs()).powf(1.0 / (hi - lo) as f64)
}

fn roots(p: &Poly) -> Vec<Complex<f64>> {
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let lead = p.leading();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -p.coeff(n - 1 - j) / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

impl Mul for &RationalTF {
    type Output = RationalTF;
    fn mul(self, rhs: &RationalTF) -> RationalTF {
        RationalTF::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RationalTF {
    type Output = RationalTF;
    fn div(self, rhs: &RationalTF) -> RationalTF {
        RationalTF::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

impl Add for &RationalTF {
    type Output = RationalTF;
    fn add(self, rhs: &RationalTF) -> RationalTF {
        if self.den == rhs.den {
            return RationalTF::new(&self.num + &rhs.num, self.den.clone());
        }
        RationalTF::new(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub for &RationalTF {
    type Output = RationalTF;
    fn sub(self, rhs: &RationalTF) -> RationalTF {
        self + &(-rhs)
    }
}

impl Neg for &RationalTF {
    type Output = RationalTF;
    fn neg(self) -> RationalTF {
        RationalTF::new(-&self.num, self.den.clone())
    }
}
