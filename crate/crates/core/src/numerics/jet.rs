//! Third-order jets of analytic functions of one complex variable.
//!
//! A [`Jet3`] stores `(f, f', f'', f''')` at a point. Arithmetic follows the
//! Leibniz rule and composition with elementary functions uses the
//! Faà di Bruno formula truncated at order three, so evaluating an
//! expression on the identity seed yields its exact derivatives up to
//! rounding.

use std::f64::consts::TAU;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Modulus below which a value is treated as zero by `log` and `pow`.
pub const ZERO_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet3 {
    pub f0: Complex64,
    pub f1: Complex64,
    pub f2: Complex64,
    pub f3: Complex64,
}

impl Jet3 {
    pub const fn new(f0: Complex64, f1: Complex64, f2: Complex64, f3: Complex64) -> Self {
        Self { f0, f1, f2, f3 }
    }

    /// Seed for the independent variable: `(z, 1, 0, 0)`.
    pub fn identity(z: Complex64) -> Self {
        Self::new(z, Complex64::new(1.0, 0.0), Complex64::default(), Complex64::default())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(c, Complex64::default(), Complex64::default(), Complex64::default())
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.f0, self.f1, self.f2, self.f3]
    }

    /// The jet of `f'` with its unknown fourth derivative set to zero.
    ///
    /// Only the first three channels of the result are meaningful.
    pub fn derivative(&self) -> Self {
        Self::new(self.f1, self.f2, self.f3, Complex64::default())
    }

    /// Jet of `g ∘ self`, given `g, g', g'', g'''` at `self.f0`.
    pub fn compose(&self, g: [Complex64; 4]) -> Self {
        let (a1, a2, a3) = (self.f1, self.f2, self.f3);
        Self::new(
            g[0],
            g[1] * a1,
            g[2] * a1 * a1 + g[1] * a2,
            g[3] * a1 * a1 * a1 + 3.0 * g[2] * a1 * a2 + g[1] * a3,
        )
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.f0 * c, self.f1 * c, self.f2 * c, self.f3 * c)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.f0.norm() < ZERO_THRESHOLD {
            return Err(Error::ZeroValue(self.f0));
        }
        let r = self.f0.inv();
        let r2 = r * r;
        Ok(self.compose([r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2]))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(*self * rhs.recip()?)
    }

    /// Principal-branch logarithm in the value channel.
    pub fn log(&self) -> Result<Self> {
        if self.f0.norm() < ZERO_THRESHOLD {
            return Err(Error::ZeroValue(self.f0));
        }
        let r = self.f0.inv();
        Ok(self.compose([self.f0.ln(), r, -r * r, 2.0 * r * r * r]))
    }

    pub fn exp(&self) -> Self {
        let e = self.f0.exp();
        self.compose([e; 4])
    }

    /// `exp(alpha * (Log a + 2πi·log_offset))`.
    ///
    /// The derivative channels do not depend on the branch; only the value
    /// (and hence the overall scale) does.
    pub fn powc(&self, alpha: Complex64, log_offset: i64) -> Result<Self> {
        if self.f0.norm() < ZERO_THRESHOLD {
            return Err(Error::ZeroValue(self.f0));
        }
        let log = self.f0.ln() + Complex64::new(0.0, TAU * log_offset as f64);
        let g0 = (alpha * log).exp();
        let r = self.f0.inv();
        let g1 = alpha * g0 * r;
        let g2 = (alpha - 1.0) * g1 * r;
        let g3 = (alpha - 2.0) * g2 * r;
        Ok(self.compose([g0, g1, g2, g3]))
    }

    /// Integer power by repeated multiplication; works at zeros of `self`.
    pub fn powi(&self, n: i32) -> Result<Self> {
        let mut base = if n < 0 { self.recip()? } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::constant(Complex64::new(1.0, 0.0));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.powc(Complex64::new(0.5, 0.0), 0)
    }
}

/// Leibniz product, free-function form.
pub fn jet_mul(a: Jet3, b: Jet3) -> Jet3 {
    a * b
}

pub fn jet_log(a: Jet3) -> Result<Jet3> {
    a.log()
}

pub fn jet_pow(a: Jet3, alpha: Complex64, log_offset: i64) -> Result<Jet3> {
    a.powc(alpha, log_offset)
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, o: Jet3) -> Jet3 {
        Jet3::new(self.f0 + o.f0, self.f1 + o.f1, self.f2 + o.f2, self.f3 + o.f3)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, o: Jet3) -> Jet3 {
        Jet3::new(self.f0 - o.f0, self.f1 - o.f1, self.f2 - o.f2, self.f3 - o.f3)
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.f0, -self.f1, -self.f2, -self.f3)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, b: Jet3) -> Jet3 {
        let a = self;
        Jet3::new(
            a.f0 * b.f0,
            a.f1 * b.f0 + a.f0 * b.f1,
            a.f2 * b.f0 + 2.0 * a.f1 * b.f1 + a.f0 * b.f2,
            a.f3 * b.f0 + 3.0 * a.f2 * b.f1 + 3.0 * a.f1 * b.f2 + a.f0 * b.f3,
        )
    }
}

/// Unchecked quotient; a zero divisor produces non-finite channels.
impl Div for Jet3 {
    type Output = Jet3;
    fn div(self, b: Jet3) -> Jet3 {
        match b.recip() {
            Ok(r) => self * r,
            Err(_) => Jet3::constant(Complex64::new(f64::NAN, f64::NAN)),
        }
    }
}

impl Add<Complex64> for Jet3 {
    type Output = Jet3;
    fn add(mut self, c: Complex64) -> Jet3 {
        self.f0 += c;
        self
    }
}

impl Sub<Complex64> for Jet3 {
    type Output = Jet3;
    fn sub(mut self, c: Complex64) -> Jet3 {
        self.f0 -= c;
        self
    }
}

impl Mul<Complex64> for Jet3 {
    type Output = Jet3;
    fn mul(self, c: Complex64) -> Jet3 {
        self.scale(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: Jet3, b: [Complex64; 4], tol: f64) {
        for (x, y) in a.as_array().iter().zip(b.iter()) {
            assert!((x - y).norm() <= tol * (1.0 + y.norm()), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn identity_squared() {
        let z = Jet3::identity(c(0.3));
        close(jet_mul(z, z), [c(0.09), c(0.6), c(2.0), c(0.0)], 1e-15);
    }

    #[test]
    fn exp_squared_is_exp_of_double() {
        let e = Jet3::identity(c(0.0)).exp();
        close(e * e, [c(1.0), c(2.0), c(4.0), c(8.0)], 1e-15);
    }

    #[test]
    fn inverse_linear_squared() {
        // (1-z)^-1 at 0.5 squared is (1-z)^-2: 4, 16, 96, 768 by direct differentiation.
        let one_minus = Jet3::constant(c(1.0)) - Jet3::identity(c(0.5));
        let r = one_minus.recip().unwrap();
        close(r * r, [c(4.0), c(16.0), c(96.0), c(768.0)], 1e-14);
    }

    #[test]
    fn log_examples() {
        close(jet_log(Jet3::constant(c(1.0))).unwrap(), [c(0.0); 4], 0.0);
        let one_plus = Jet3::identity(c(0.0)) + c(1.0);
        close(jet_log(one_plus).unwrap(), [c(0.0), c(1.0), c(-1.0), c(2.0)], 1e-15);
        // -2 log(1-z): derivatives 2/(1-z), 2/(1-z)^2, 4/(1-z)^3 at 0.
        let k = (Jet3::constant(c(1.0)) - Jet3::identity(c(0.0))).powi(-2).unwrap();
        close(jet_log(k).unwrap(), [c(0.0), c(2.0), c(2.0), c(4.0)], 1e-15);
    }

    #[test]
    fn log_of_zero_is_rejected() {
        assert!(matches!(Jet3::constant(c(0.0)).log(), Err(Error::ZeroValue(_))));
        assert!(matches!(
            Jet3::identity(c(0.0)).powc(c(0.5), 0),
            Err(Error::ZeroValue(_))
        ));
    }

    #[test]
    fn pow_examples() {
        let a = Jet3::new(c(1.5), c(2.0), c(-0.25), Complex64::new(0.0, 3.0));
        close(jet_pow(a, c(0.0), 0).unwrap(), [c(1.0), c(0.0), c(0.0), c(0.0)], 0.0);
        close(jet_pow(a, c(1.0), 0).unwrap(), a.as_array(), 1e-15);

        // ((1+z)/(1-z))^(1/2) at z = 0.2. With u = (1+z)/(1-z):
        // u' = 2/(1-z)^2, and sqrt(u)' = u'/(2 sqrt u) etc. Closed forms:
        // F = sqrt((1+z)/(1-z)) = (1+z)^(1/2) (1-z)^(-1/2)
        // F' = F / (1 - z^2)
        // F'' = F (1 + 2z) / (1 - z^2)^2
        // F''' = F (6z^2 + 6z + 3) / (1 - z^2)^3
        let z = 0.2;
        let f = (1.5f64).sqrt();
        let w = 1.0 - z * z;
        let expected = [
            c(f),
            c(f / w),
            c(f * (1.0 + 2.0 * z) / (w * w)),
            c(f * (6.0 * z * z + 6.0 * z + 3.0) / (w * w * w)),
        ];
        let zj = Jet3::identity(c(z));
        let u = (zj + c(1.0)).checked_div(&(Jet3::constant(c(1.0)) - zj)).unwrap();
        close(jet_pow(u, c(0.5), 0).unwrap(), expected, 1e-14);
        assert!((expected[0].re - 1.224745).abs() < 1e-6);
    }

    #[test]
    fn log_offset_changes_only_the_scale() {
        let a = Jet3::new(Complex64::new(-1.0, 0.5), c(1.0), c(0.3), c(0.1));
        let alpha = Complex64::new(0.3, 0.2);
        let p0 = a.powc(alpha, 0).unwrap();
        let p1 = a.powc(alpha, 1).unwrap();
        let ratio = (alpha * Complex64::new(0.0, TAU)).exp();
        close(p1, p0.scale(ratio).as_array(), 1e-14);
    }
}
