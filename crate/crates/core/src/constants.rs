//! Sharp constants of the transforms.
//!
//! * `h(r) = −(1+r)²/(r + 2 log(1−r)) − (1−r²)/r` and its maximiser `r₀` on
//!   `(0, 1)`, so that `‖T_{J_α[f]}‖ ≤ |α| h(r₀)` over the class ℝ.
//! * `θ₀`, the maximiser of `arg q(e^{iθ})` for
//!   `q(z) = (−z − 2 log(1−z))/z`, with `β₀ = (2/π) arg q(e^{iθ₀})` and
//!   `α₀ = 1/β₀`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::Analytic;
use crate::error::{Error, Result};
use crate::funclang::Function;
use crate::numerics::{complex_pair, wrap_angle, PowerSeries};

/// Six-decimal reference values the computed constants are compared with.
pub mod reference {
    pub const R0: f64 = 0.329423;
    pub const H_R0: f64 = 1.055681;
    pub const INV_H_R0: f64 = 0.947255;
    pub const THETA0: f64 = 1.141377;
    pub const BETA0: f64 = 0.580356;
    pub const ALPHA0: f64 = 1.723078;
}

pub const DEFAULT_TOL: f64 = 1e-13;

fn check_unit_interval(r: f64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(Complex64::new(r, 0.0), "h is defined on (0, 1)"));
    }
    Ok(())
}

/// `r + 2 log(1 − r)`.
fn h_denominator(r: f64) -> f64 {
    r + 2.0 * (-r).ln_1p()
}

pub fn h(r: f64) -> Result<f64> {
    check_unit_interval(r)?;
    Ok(-(1.0 + r).powi(2) / h_denominator(r) - (1.0 - r * r) / r)
}

/// `h(r) − h(c)` without the cancellation of subtracting two nearby values.
pub fn h_increment(r: f64, c: f64) -> Result<f64> {
    check_unit_interval(r)?;
    check_unit_interval(c)?;
    let d = r - c;
    let (dr, dc) = (h_denominator(r), h_denominator(c));
    // D(c) − D(r) = −d + 2 log((1−c)/(1−r))
    let dd = -d + 2.0 * (d / (1.0 - r)).ln_1p();
    let num = (1.0 + c).powi(2) * dd + d * (2.0 + 2.0 * c + d) * dc;
    let a = -num / (dr * dc);
    // (1−r²)/r − (1−c²)/c = −d (1/(rc) + 1)
    let b = -d * (1.0 / (r * c) + 1.0);
    Ok(a - b)
}

/// Left side of the equation whose root in `(0, 1)` is `r₀`:
/// `2(r²+1)(r−1) log²(1−r) − 2r(r−1)² log(1−r) + r³(r+3)`.
pub fn r0_equation(r: f64) -> f64 {
    let l = (-r).ln_1p();
    2.0 * (r * r + 1.0) * (r - 1.0) * l * l - 2.0 * r * (r - 1.0).powi(2) * l + r.powi(3) * (r + 3.0)
}

const FD_STEP: f64 = 1e-7;

fn central_diff(f: impl Fn(f64) -> Result<f64>, x: f64, step: f64) -> Result<f64> {
    Ok((f(x + step)? - f(x - step)?) / (2.0 * step))
}

/// Sign-change scan on `[a, b]` followed by bisection to width `tol` and a
/// short Newton polish. Returns the root nearest `near` among the brackets.
fn scan_bisect_newton(
    f: &dyn Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    n_scan: usize,
    near: Option<f64>,
    tol: f64,
    what: &'static str,
) -> Result<f64> {
    let xs: Vec<f64> = (0..=n_scan).map(|k| a + (b - a) * k as f64 / n_scan as f64).collect();
    let mut brackets = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &x in &xs {
        let Ok(fx) = f(x) else {
            prev = None;
            continue;
        };
        if let Some((px, pf)) = prev {
            if pf == 0.0 {
                brackets.push((px, px));
            } else if pf.signum() != fx.signum() {
                brackets.push((px, x));
            }
        }
        prev = Some((x, fx));
    }
    let target = near.unwrap_or(a);
    let &(mut lo, mut hi) = brackets
        .iter()
        .min_by(|p, q| ((p.0 - target).abs()).total_cmp(&(q.0 - target).abs()))
        .ok_or(Error::BracketFailure(what))?;
    if lo == hi {
        return Ok(lo);
    }
    let mut flo = f(lo)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    let width = (hi - lo).max(tol);
    for _ in 0..10 {
        let d = central_diff(f, x, FD_STEP)?;
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let step = f(x)? / d;
        // keep the polish inside the final bracket
        if !step.is_finite() || step.abs() > width {
            break;
        }
        x -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    Ok(x)
}

/// Golden-section maximisation driven by a pairwise comparison
/// `better(x, y) = g(x) − g(y)`.
fn golden_max_by(better: impl Fn(f64, f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    while b - a > tol {
        if better(x1, x2) >= 0.0 {
            b = x2;
            x2 = x1;
            x1 = b - INV_PHI * (b - a);
        } else {
            a = x1;
            x1 = x2;
            x2 = a + INV_PHI * (b - a);
        }
    }
    0.5 * (a + b)
}

/// Root of [`r0_equation`] in `(0, 1)`.
pub fn solve_r0() -> Result<f64> {
    solve_r0_tol(DEFAULT_TOL)
}

pub fn solve_r0_tol(tol: f64) -> Result<f64> {
    scan_bisect_newton(&|r| Ok(r0_equation(r)), 1e-3, 1.0 - 1e-3, 999, None, tol, "r0 equation")
}

/// Maximiser of `h` on `(0, 1)` by golden section on [`h_increment`].
pub fn argmax_h() -> Result<f64> {
    // coarse scan for the bracket
    let n = 1000;
    let xs: Vec<f64> = (1..n).map(|k| k as f64 / n as f64).collect();
    let mut best = xs[0];
    for &x in &xs[1..] {
        if h_increment(x, best)? > 0.0 {
            best = x;
        }
    }
    let (a, b) = ((best - 1.0 / n as f64).max(1e-9), (best + 1.0 / n as f64).min(1.0 - 1e-9));
    Ok(golden_max_by(|x, y| h_increment(x, y).unwrap_or(f64::NEG_INFINITY), a, b, 1e-14))
}

/// `cos θ + 2 log(2 sin(θ/2))`.
pub fn varsigma_denominator(theta: f64) -> f64 {
    theta.cos() + 2.0 * (2.0 * (0.5 * theta).sin()).ln()
}

pub fn varsigma(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::domain(Complex64::new(theta, 0.0), "varsigma is defined on (0, π)"));
    }
    let den = varsigma_denominator(theta);
    if den.abs() < 1e-12 {
        return Err(Error::PoleProximity(theta));
    }
    Ok((theta.sin() + theta - PI) / den)
}

/// Zero of the denominator of ς in `(0, π)`.
pub fn pole_theta() -> Result<f64> {
    scan_bisect_newton(&|t| Ok(varsigma_denominator(t)), 0.1, FRAC_PI_2, 100, None, DEFAULT_TOL, "varsigma pole")
}

/// `−e^{iθ} − 2 log(1 − e^{iθ})`, the numerator of `q(e^{iθ})`.
fn q_boundary_numerator(theta: f64) -> Complex64 {
    let e = Complex64::from_polar(1.0, theta);
    -e - 2.0 * (2.0 * (0.5 * theta).sin()).ln() - Complex64::new(0.0, theta - PI)
}

/// `q(e^{iθ})` for `0 < θ < 2π`.
pub fn q_boundary(theta: f64) -> Complex64 {
    q_boundary_numerator(theta) / Complex64::from_polar(1.0, theta)
}

/// `arg q(e^{iθ})`, from the two-argument arctangent of the numerator.
pub fn arg_q_boundary(theta: f64) -> f64 {
    let w = q_boundary_numerator(theta);
    wrap_angle(w.im.atan2(w.re) - theta)
}

/// `ς'(θ) − ς(θ)² − 1`, whose root right of the pole is the critical point
/// of `arg q(e^{iθ})`.
pub fn theta0_equation(theta: f64) -> Result<f64> {
    let s = varsigma(theta)?;
    let ds = central_diff(varsigma, theta, FD_STEP)?;
    Ok(ds - s * s - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSolution {
    pub theta0: f64,
    pub beta0: f64,
    pub alpha0: f64,
    /// θ₀ from the root of [`theta0_equation`].
    pub theta0_root: f64,
    /// Whether the maximiser over `(0, π)` lies in `(0, π/2)`.
    pub in_first_quarter: bool,
}

const THETA_SCAN: usize = 100_000;

pub fn solve_theta0_beta0_alpha0() -> Result<ThetaSolution> {
    solve_theta0_tol(DEFAULT_TOL)
}

pub fn solve_theta0_tol(tol: f64) -> Result<ThetaSolution> {
    let h = PI / THETA_SCAN as f64;
    let mut best = (h, arg_q_boundary(h));
    for k in 2..THETA_SCAN {
        let t = k as f64 * h;
        let v = arg_q_boundary(t);
        if v > best.1 {
            best = (t, v);
        }
    }
    let theta0 = golden_max_by(|x, y| arg_q_boundary(x) - arg_q_boundary(y), best.0 - h, best.0 + h, 1e-12);
    let beta0 = 2.0 / PI * arg_q_boundary(theta0);
    let pole = pole_theta()?;
    let theta0_root =
        scan_bisect_newton(&theta0_equation, pole + 1e-6, PI - 1e-6, 2000, Some(theta0), tol.max(1e-13), "theta0 equation")?;
    if (theta0_root - theta0).abs() > 1e-4 {
        return Err(Error::Inconsistent(format!(
            "theta0 from maximisation ({theta0}) and from the root characterisation ({theta0_root}) differ"
        )));
    }
    Ok(ThetaSolution { theta0, beta0, alpha0: 1.0 / beta0, theta0_root, in_first_quarter: theta0 < FRAC_PI_2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaperConstants {
    pub r0: f64,
    pub h_r0: f64,
    pub inv_h_r0: f64,
    pub theta0: f64,
    pub beta0: f64,
    pub alpha0: f64,
    pub pole_theta: f64,
}

impl PaperConstants {
    pub fn compute() -> Result<Self> {
        Self::compute_tol(DEFAULT_TOL)
    }

    pub fn compute_tol(tol: f64) -> Result<Self> {
        let r0 = solve_r0_tol(tol)?;
        let h_r0 = h(r0)?;
        let t = solve_theta0_tol(tol)?;
        Ok(Self { r0, h_r0, inv_h_r0: 1.0 / h_r0, theta0: t.theta0, beta0: t.beta0, alpha0: t.alpha0, pole_theta: pole_theta()? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValues {
    pub r0: f64,
    pub h_r0: f64,
    pub inv_h_r0: f64,
    pub theta0: f64,
    pub beta0: f64,
    pub alpha0: f64,
}

pub const REFERENCE: ReferenceValues = ReferenceValues {
    r0: reference::R0,
    h_r0: reference::H_R0,
    inv_h_r0: reference::INV_H_R0,
    theta0: reference::THETA0,
    beta0: reference::BETA0,
    alpha0: reference::ALPHA0,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub constants: PaperConstants,
    pub reference: ReferenceValues,
    pub deviations: ReferenceValues,
    /// Maximiser of `h` found by golden section, against `r0` from the root.
    pub r0_argmax: f64,
    pub theta0_root: f64,
    pub theta0_in_first_quarter: bool,
    /// `π / (2 q(e^{iθ₀}))` read literally, a complex number.
    #[serde(with = "complex_pair")]
    pub alpha0_literal: Complex64,
}

impl ConstantsReport {
    pub fn compute(tol: f64) -> Result<Self> {
        let constants = PaperConstants::compute_tol(tol)?;
        let t = solve_theta0_tol(tol)?;
        let c = &constants;
        let deviations = ReferenceValues {
            r0: (c.r0 - REFERENCE.r0).abs(),
            h_r0: (c.h_r0 - REFERENCE.h_r0).abs(),
            inv_h_r0: (c.inv_h_r0 - REFERENCE.inv_h_r0).abs(),
            theta0: (c.theta0 - REFERENCE.theta0).abs(),
            beta0: (c.beta0 - REFERENCE.beta0).abs(),
            alpha0: (c.alpha0 - REFERENCE.alpha0).abs(),
        };
        Ok(Self {
            constants,
            reference: REFERENCE,
            deviations,
            r0_argmax: argmax_h()?,
            theta0_root: t.theta0_root,
            theta0_in_first_quarter: t.in_first_quarter,
            alpha0_literal: FRAC_PI_2 / q_boundary(c.theta0),
        })
    }

    pub fn max_deviation(&self) -> f64 {
        let d = &self.deviations;
        [d.r0, d.h_r0, d.inv_h_r0, d.theta0, d.beta0, d.alpha0].into_iter().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorCheck {
    pub inside: bool,
    #[serde(with = "complex_pair")]
    pub worst_z: Complex64,
    /// `|arg f(worst_z)|`.
    pub worst_arg: f64,
    pub bound: f64,
}

/// Whether `|arg f(z)| < βπ/2` on a polar grid of about `n_samples` points
/// with `|z| ≤ 0.9999`.
pub fn sector_containment_check<F: Analytic + ?Sized>(f: &F, beta: f64, n_samples: usize) -> Result<SectorCheck> {
    if !(beta > 0.0 && beta <= 2.0) {
        return Err(Error::BadParameter(format!("beta = {beta} must lie in (0, 2]")));
    }
    let side = (n_samples as f64).sqrt().ceil().max(2.0) as usize;
    let r_max = 0.9999;
    let bound = beta * FRAC_PI_2;
    let mut worst = (Complex64::default(), -1.0);
    for i in 1..=side {
        let r = r_max * (FRAC_PI_2 * i as f64 / side as f64).sin();
        for j in 0..side {
            let z = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / side as f64);
            let a = f.value(z)?.arg().abs();
            if a > worst.1 {
                worst = (z, a);
            }
        }
    }
    let zero = f.value(Complex64::default())?.arg().abs();
    if zero > worst.1 {
        worst = (Complex64::default(), zero);
    }
    Ok(SectorCheck { inside: worst.1 < bound, worst_z: worst.0, worst_arg: worst.1, bound })
}

/// `g(z) = 1 + ((1+z)/(1−z)) · z/(z + 2 log(1−z))`.
pub fn g_value(z: Complex64) -> Result<Complex64> {
    let den = z + 2.0 * (1.0 - z).ln();
    if den.norm() < 1e-300 {
        return Err(Error::domain(z, "z + 2 log(1 - z) vanishes"));
    }
    Ok(1.0 + (1.0 + z) / (1.0 - z) * z / den)
}

/// Taylor series of [`g_value`] through `order`.
pub fn g_series(order: usize) -> Result<PowerSeries> {
    let f = Function::expr("1+((1+z)/(1-z))*(z/(z+2*log(1-z)))")?;
    f.series(order)
}
