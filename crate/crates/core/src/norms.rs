//! Pre-Schwarzian and Schwarzian hyperbolic sup-norms
//!
//! ```text
//! ‖T_f‖ = sup (1 − |z|²) |f''/f'|,     ‖S_f‖ = sup (1 − |z|²)² |S_f|
//! ```
//!
//! computed by a polar grid search followed by golden-section refinement.
//! The reported value is the largest weighted modulus actually evaluated,
//! i.e. a lower bound for the supremum; nothing is certified.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::Analytic;
use crate::error::{Error, Result};
use crate::funclang::{Function, FunctionSpec};
use crate::numerics::{complex_pair, DEFAULT_ORDER};
use crate::transforms::{alexander_series, j_alpha_series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    PreSchwarzian,
    Schwarzian,
}

impl FieldKind {
    /// Exponent `p` of the weight `(1 − |z|²)^p`.
    pub fn weight_power(self) -> i32 {
        match self {
            FieldKind::PreSchwarzian => 1,
            FieldKind::Schwarzian => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormOptions {
    pub n_radial: usize,
    pub n_angular: usize,
    pub r_max: f64,
    pub refine_iters: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { n_radial: 400, n_angular: 720, r_max: 0.9999, refine_iters: 60 }
    }
}

/// Radius up to which order-256 series summation is trusted.
pub const SERIES_TRUSTED_RADIUS: f64 = 0.9;

impl NormOptions {
    /// Coarser grid confined to [`SERIES_TRUSTED_RADIUS`], for series-backed functions.
    pub fn series_backed() -> Self {
        Self { n_radial: 60, n_angular: 120, r_max: SERIES_TRUSTED_RADIUS, refine_iters: 60 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.r_max > 0.0 && self.r_max < 1.0) {
            return Err(Error::BadParameter(format!("r_max = {} must lie in (0, 1)", self.r_max)));
        }
        if self.n_radial == 0 || self.n_angular == 0 {
            return Err(Error::BadParameter("grid sizes must be positive".into()));
        }
        Ok(())
    }

    /// Radii `r_max·sin(π i / 2n)`, `i = 0..=n`, denser towards `r_max`.
    pub fn radii(&self) -> Vec<f64> {
        let n = self.n_radial;
        (0..=n).map(|i| self.r_max * (FRAC_PI_2 * i as f64 / n as f64).sin()).collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_angular).map(|j| TAU * j as f64 / self.n_angular as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub n_radial: usize,
    pub n_angular: usize,
    pub r_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    #[serde(with = "complex_pair")]
    pub argmax: Complex64,
    pub grid: GridInfo,
    pub refined: bool,
    /// Grid points where evaluation failed (critical points, singularities).
    pub skipped: usize,
}

/// Weighted moduli above this mark the function as not locally univalent.
pub const INFINITY_THRESHOLD: f64 = 1e12;

pub fn pre_schwarzian<F: Analytic + ?Sized>(f: &F, z: Complex64) -> Result<Complex64> {
    f.pre_schwarzian(z)
}

pub fn schwarzian<F: Analytic + ?Sized>(f: &F, z: Complex64) -> Result<Complex64> {
    f.schwarzian(z)
}

/// `(1 − |z|²)^p |field(z)|`.
pub fn weighted<F: Analytic + ?Sized>(f: &F, kind: FieldKind, z: Complex64) -> Result<f64> {
    let v = match kind {
        FieldKind::PreSchwarzian => f.pre_schwarzian(z)?,
        FieldKind::Schwarzian => f.schwarzian(z)?,
    };
    let w = (1.0 - z.norm_sqr()).powi(kind.weight_power());
    let out = w * v.norm();
    if out.is_nan() {
        return Err(Error::domain(z, "field evaluates to NaN"));
    }
    Ok(out)
}

fn golden_max(mut g: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut g1, mut g2) = (g(x1), g(x2));
    for _ in 0..iters {
        if g1 >= g2 {
            b = x2;
            x2 = x1;
            g2 = g1;
            x1 = b - INV_PHI * (b - a);
            g1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            g1 = g2;
            x2 = a + INV_PHI * (b - a);
            g2 = g(x2);
        }
    }
    if g1 >= g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}

const REFINE_SWEEPS: usize = 4;

/// Hyperbolic sup-norm of `T_f` or `S_f` by grid search and refinement.
///
/// Ties are broken towards the smallest radius, then the smallest angle.
/// Points where evaluation fails are skipped and counted. If any weighted
/// value exceeds [`INFINITY_THRESHOLD`] the norm is reported as infinite.
pub fn norm<F: Analytic + ?Sized>(f: &F, kind: FieldKind, opts: &NormOptions) -> Result<NormResult> {
    opts.validate()?;
    let radii = opts.radii();
    let angles = opts.angles();
    let cells: Vec<(usize, usize)> =
        (0..radii.len()).flat_map(|i| (0..angles.len()).map(move |j| (i, j))).collect();
    let values: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(i, j)| weighted(f, kind, Complex64::from_polar(radii[i], angles[j])).ok())
        .collect();

    let grid = GridInfo { n_radial: opts.n_radial, n_angular: opts.n_angular, r_max: opts.r_max };
    let skipped = values.iter().filter(|v| v.is_none()).count();
    let mut best: Option<(usize, f64)> = None;
    for (k, v) in values.iter().enumerate() {
        if let Some(v) = *v {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
    }
    let (k, grid_max) = best.ok_or(Error::AllPointsSingular)?;
    let (i, j) = cells[k];
    let at = |r: f64, t: f64| Complex64::from_polar(r, t);
    if grid_max > INFINITY_THRESHOLD {
        return Ok(NormResult { value: f64::INFINITY, argmax: at(radii[i], angles[j]), grid, refined: false, skipped });
    }

    let eval = |r: f64, t: f64| weighted(f, kind, at(r, t)).unwrap_or(f64::NEG_INFINITY);
    let (mut r, mut t, mut v) = (radii[i], angles[j], grid_max);
    let dr_lo = if i > 0 { radii[i] - radii[i - 1] } else { 0.0 };
    let dr_hi = if i + 1 < radii.len() { radii[i + 1] - radii[i] } else { 0.0 };
    let dt = TAU / opts.n_angular as f64;
    let mut refined = false;
    if opts.refine_iters > 0 {
        for _ in 0..REFINE_SWEEPS {
            let lo = (r - dr_lo.max(dr_hi)).max(0.0);
            let hi = (r + dr_lo.max(dr_hi)).min(opts.r_max);
            if hi > lo {
                let (rr, vr) = golden_max(|x| eval(x, t), lo, hi, opts.refine_iters);
                // the endpoint r_max is often the maximiser
                let (rr, vr) = if eval(hi, t) > vr { (hi, eval(hi, t)) } else { (rr, vr) };
                if vr > v {
                    r = rr;
                    v = vr;
                    refined = true;
                }
            }
            if r > 0.0 {
                let (tt, vt) = golden_max(|x| eval(r, x), t - dt, t + dt, opts.refine_iters);
                if vt > v {
                    t = tt;
                    v = vt;
                    refined = true;
                }
            }
        }
    }
    let argmax = at(r, t);
    // recompute so that value and argmax agree exactly
    let value = weighted(f, kind, argmax)?;
    Ok(NormResult { value, argmax, grid, refined, skipped })
}

pub fn norm_spec(spec: &FunctionSpec, kind: FieldKind, opts: &NormOptions) -> Result<NormResult> {
    norm(&spec.compile()?, kind, opts)
}

/// `(‖T_{J_α[f]}‖, |α|·‖T_{J[f]}‖)`, each computed from its own truncated series.
pub fn norm_scaling_check(f: &FunctionSpec, alpha: Complex64) -> Result<(f64, f64)> {
    norm_scaling_check_with(f, alpha, &NormOptions::series_backed())
}

pub fn norm_scaling_check_with(f: &FunctionSpec, alpha: Complex64, opts: &NormOptions) -> Result<(f64, f64)> {
    let s = f.compile()?.series(DEFAULT_ORDER)?;
    let ja = Function::Series(j_alpha_series(&s, alpha, DEFAULT_ORDER)?);
    let j1 = Function::Series(alexander_series(&s, DEFAULT_ORDER)?);
    let lhs = norm(&ja, FieldKind::PreSchwarzian, opts)?.value;
    let rhs = alpha.norm() * norm(&j1, FieldKind::PreSchwarzian, opts)?.value;
    Ok((lhs, rhs))
}
