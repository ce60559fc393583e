//! Truncated power series `c₀ + c₁z + … + c_N z^N` with complex coefficients.
//!
//! Order bookkeeping is exact: operations that lose information about the
//! top coefficient (differentiation, division by `z`) lower the truncation
//! order by one, integration raises it by one, and binary operations take
//! the smaller order of their operands.
//!
//! Summation is only trusted for `|z| ≤ 0.9` at the default order 256;
//! searches closer to the boundary should use closed-form or jet evaluators.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::jet::Jet3;

pub const DEFAULT_ORDER: usize = 256;

/// Tolerance on `c₀ = 1` for `log` and `pow`.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl PowerSeries {
    /// Builds a series from `c₀ … c_N`; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::BadParameter("a power series needs at least one coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self { coeffs: (0..=order).map(f).collect() }
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Complex64::default(); order + 1] }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    /// The series of `z`.
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    /// Series of `1/(1 - z)`.
    pub fn geometric(order: usize) -> Self {
        Self::from_fn(order, |_| Complex64::new(1.0, 0.0))
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `zⁿ`, zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Lowers the order to `order`; never raises it.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::InsufficientOrder { have: self.order(), need: order });
        }
        Ok(Self { coeffs: self.coeffs[..=order].to_vec() })
    }

    /// Pads with zero coefficients up to `order`. Only correct for polynomials.
    pub fn pad_polynomial(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order.max(self.order()) + 1, Complex64::default());
        Self { coeffs }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&a| a * c).collect() }
    }

    fn common_order(&self, other: &Self) -> usize {
        self.order().min(other.order())
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let mut out = vec![Complex64::default(); n + 1];
        for (i, &a) in self.coeffs[..=n].iter().enumerate() {
            if a == Complex64::default() {
                continue;
            }
            for (j, &b) in other.coeffs[..=n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self { coeffs: out }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let b0 = other.coeffs[0];
        if b0.norm() < 1e-300 {
            return Err(Error::DivisorConstantZero);
        }
        let n = self.common_order(other);
        let inv = b0.inv();
        let mut q = vec![Complex64::default(); n + 1];
        for k in 0..=n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * q[k - j];
            }
            q[k] = acc * inv;
        }
        Ok(Self { coeffs: q })
    }

    /// Quotient when both series may vanish at the origin.
    ///
    /// Leading zeros of the divisor are cancelled against the dividend,
    /// which must vanish to the same order (within `tol`). Each cancelled
    /// power costs one order of truncation.
    pub fn div_cancelling(&self, other: &Self, tol: f64) -> Result<Self> {
        let k = other.coeffs.iter().position(|c| c.norm() > tol).ok_or(Error::DivisorConstantZero)?;
        if k == 0 {
            return self.div(other);
        }
        for c in &self.coeffs[..k.min(self.coeffs.len())] {
            if c.norm() > tol {
                return Err(Error::DivisorConstantZero);
            }
        }
        if self.order() < k || other.order() < k {
            return Err(Error::InsufficientOrder { have: self.order().min(other.order()), need: k });
        }
        let num = Self { coeffs: self.coeffs[k..].to_vec() };
        let den = Self { coeffs: other.coeffs[k..].to_vec() };
        num.div(&den)
    }

    /// Term-by-term derivative; the order drops by one.
    pub fn derive(&self) -> Self {
        if self.order() == 0 {
            return Self::zero(0);
        }
        Self {
            coeffs: self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, &c)| c * (k + 1) as f64)
                .collect(),
        }
    }

    /// Primitive vanishing at the origin; the order rises by one.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::default());
        coeffs.extend(self.coeffs.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
        Self { coeffs }
    }

    /// `s(z)/z` for a series with `c₀ = 0`; the order drops by one.
    pub fn shift_div_z(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.norm() > NORMALIZATION_TOL {
            return Err(Error::NonzeroConstantTerm(c0));
        }
        if self.order() == 0 {
            return Err(Error::InsufficientOrder { have: 0, need: 1 });
        }
        Ok(Self { coeffs: self.coeffs[1..].to_vec() })
    }

    fn require_unit_constant(&self, what: &'static str) -> Result<()> {
        let c0 = self.coeffs[0];
        if (c0 - 1.0).norm() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { what, found: c0 });
        }
        Ok(())
    }

    /// Logarithm of a series with `c₀ = 1`, via `n Lₙ = n sₙ − Σ_{k<n} k L_k s_{n−k}`.
    pub fn log(&self) -> Result<Self> {
        self.require_unit_constant("series log needs c0 = 1")?;
        let s = &self.coeffs;
        let n_max = self.order();
        let mut l = vec![Complex64::default(); n_max + 1];
        for n in 1..=n_max {
            let mut acc = s[n] * n as f64;
            for k in 1..n {
                acc -= l[k] * s[n - k] * k as f64;
            }
            l[n] = acc / n as f64;
        }
        Ok(Self { coeffs: l })
    }

    /// Exponential via `n Eₙ = Σ_{k=1}^{n} k s_k E_{n−k}`.
    pub fn exp(&self) -> Self {
        let s = &self.coeffs;
        let n_max = self.order();
        let mut e = vec![Complex64::default(); n_max + 1];
        e[0] = s[0].exp();
        for n in 1..=n_max {
            let mut acc = Complex64::default();
            for k in 1..=n {
                acc += s[k] * e[n - k] * k as f64;
            }
            e[n] = acc / n as f64;
        }
        Self { coeffs: e }
    }

    /// `exp(alpha · log s)` for `c₀ = 1`, i.e. the branch equal to 1 at the origin.
    pub fn pow(&self, alpha: Complex64) -> Result<Self> {
        self.require_unit_constant("series pow needs c0 = 1")?;
        Ok(self.log()?.scale(alpha).exp())
    }

    /// Horner summation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::default(), |acc, &c| acc * z + c)
    }

    /// Value and first three derivatives by simultaneous Horner recurrences.
    pub fn eval_jet(&self, z: Complex64) -> Jet3 {
        let zero = Complex64::default();
        let (mut p0, mut p1, mut p2, mut p3) = (zero, zero, zero, zero);
        for &c in self.coeffs.iter().rev() {
            p3 = p3 * z + p2 * 3.0;
            p2 = p2 * z + p1 * 2.0;
            p1 = p1 * z + p0;
            p0 = p0 * z + c;
        }
        Jet3::new(p0, p1, p2, p3)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.order().max(other.order());
        (0..=n).map(|k| (self.coeff(k) - other.coeff(k)).norm()).fold(0.0, f64::max)
    }
}

/// Free-function forms of the series operations.
pub fn series_mul(a: &PowerSeries, b: &PowerSeries) -> PowerSeries {
    a.mul(b)
}

pub fn series_div(a: &PowerSeries, b: &PowerSeries) -> Result<PowerSeries> {
    a.div(b)
}

pub fn series_derive(s: &PowerSeries) -> PowerSeries {
    s.derive()
}

pub fn series_integrate(s: &PowerSeries) -> PowerSeries {
    s.integrate()
}

pub fn series_shift_div_z(s: &PowerSeries) -> Result<PowerSeries> {
    s.shift_div_z()
}

pub fn series_log(s: &PowerSeries) -> Result<PowerSeries> {
    s.log()
}

pub fn series_exp(s: &PowerSeries) -> PowerSeries {
    s.exp()
}

pub fn series_pow(s: &PowerSeries, alpha: Complex64) -> Result<PowerSeries> {
    s.pow(alpha)
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, o: &PowerSeries) -> PowerSeries {
        let n = self.common_order(o);
        PowerSeries::from_fn(n, |k| self.coeffs[k] + o.coeffs[k])
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, o: &PowerSeries) -> PowerSeries {
        let n = self.common_order(o);
        PowerSeries::from_fn(n, |k| self.coeffs[k] - o.coeffs[k])
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, o: &PowerSeries) -> PowerSeries {
        PowerSeries::mul(self, o)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}
