//! Real polynomials in `s`, coefficients in ascending powers.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    /// Trailing (highest-power) exact zeros are dropped; the zero polynomial
    /// is stored as `[0]`.
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `a·s + b`.
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(vec![b, a])
    }

    /// `s^n`.
    pub fn monomial(n: usize) -> Self {
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect::<Vec<_>>())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Poly::constant(1.0), |acc, _| &acc * self)
    }

    pub fn eval(&self, s: Complex<f64>) -> Complex<f64> {
        self.coeffs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn eval_real(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Poly::constant(0.0);
        }
        Self::new(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect::<Vec<_>>(),
        )
    }

    /// `p(k·s)`.
    pub fn substitute_scale(&self, k: f64) -> Self {
        let mut f = 1.0;
        Self::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let v = c * f;
                    f *= k;
                    v
                })
                .collect::<Vec<_>>(),
        )
    }

    pub fn norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drops high-order coefficients below `tol·‖p‖∞`.
    pub fn trimmed(&self, tol: f64) -> Self {
        let bound = tol * self.norm_inf();
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().unwrap().abs() <= bound {
            c.pop();
        }
        Self::new(c)
    }

    /// Polynomial long division: `self = q·d + r`, `deg r < deg d`.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.degree() < d.degree() {
            return (Poly::constant(0.0), self.clone());
        }
        let mut r = self.coeffs.clone();
        let dn = d.degree();
        let lead = d.leading();
        let mut q = vec![0.0; self.degree() - dn + 1];
        for k in (0..q.len()).rev() {
            let c = r[k + dn] / lead;
            q[k] = c;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= c * dc;
            }
            r[k + dn] = 0.0;
        }
        r.truncate(dn.max(1));
        (Poly::new(q), Poly::new(r))
    }

    /// Monic greatest common divisor, treating remainders below
    /// `tol·‖·‖∞` as zero. Numerically fragile unless the roots are of
    /// comparable magnitude; callers rescale `s` first.
    pub fn gcd(&self, other: &Poly, tol: f64) -> Poly {
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.clone(), other.clone())
        } else {
            (other.clone(), self.clone())
        };
        let scale = a.norm_inf().max(b.norm_inf());
        while !b.is_zero() && b.norm_inf() > tol * scale {
            let (_, r) = a.div_rem(&b);
            let r = if r.norm_inf() <= tol * scale { Poly::constant(0.0) } else { r.trimmed(tol) };
            a = b;
            b = r;
        }
        a.scale(1.0 / a.leading())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect::<Vec<_>>())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect::<Vec<_>>())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut c = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}
