//! Loewner chains, dilatation conditions and the explicit extension of
//! spirallike maps
//!
//! For `f ∈ ℝ` the chain `f_t = f + t z` has `1/p(z, t) = f'(z) + t`. For a
//! `λ`-spirallike `f` the chain `f_t = e^{e^{iλ}t} f` has an explicit inverse
//! chain, and the map
//!
//! ```text
//! Φ(z) = f(z),                     |z| ≤ 1
//! Φ(z) = f(e^{iθ})² / f(1/z̄),      |z| > 1,   f(1/z̄) = e^{−e^{iλ}t} f(e^{iθ})
//! ```
//!
//! extends `f` to the plane. [`ExtensionGrid`] samples `Φ` outside the disk
//! and estimates its Beltrami coefficient by central differences.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::Analytic;
use crate::constants::PaperConstants;
use crate::error::{Error, Result};
use crate::funclang::{Function, FunctionSpec};
use crate::norms::{norm, FieldKind, NormOptions};
use crate::numerics::{complex_pair, wrap_angle};

/// Below this modulus `f'(z) + t` is treated as zero.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-14;

/// Polar verification grid: the origin plus `n_r × n_theta` points on
/// radii `r_max·sin(πi/2n_r)`, `i = 1..=n_r`.
pub fn verification_grid(n_r: usize, n_theta: usize, r_max: f64) -> Vec<Complex64> {
    let mut out = vec![Complex64::default()];
    for i in 1..=n_r {
        let r = r_max * (FRAC_PI_2 * i as f64 / n_r as f64).sin();
        for j in 0..n_theta {
            out.push(Complex64::from_polar(r, TAU * j as f64 / n_theta as f64));
        }
    }
    out
}

/// `p(z, t) = 1/(f'(z) + t)`, the Herglotz function of `f_t = f + t z`.
pub fn herglotz_of_chain_r<F: Analytic + ?Sized>(f: &F, z: Complex64, t: f64) -> Result<Complex64> {
    if !(z.norm() < 1.0) {
        return Err(Error::domain(z, "outside the unit disk"));
    }
    if !(t >= 0.0) {
        return Err(Error::BadParameter(format!("t = {t} must be nonnegative")));
    }
    let d = f.jet(z)?.f1 + t;
    if !(d.norm() >= DIVERGENCE_THRESHOLD) {
        return Err(Error::DivergentP { z, t });
    }
    Ok(d.inv())
}

/// `|(1 − p)/(1 + p)|`.
pub fn becker_dilatation(p: Complex64) -> Result<f64> {
    let den = 1.0 + p;
    if den == Complex64::default() {
        return Err(Error::PoleAtMinusOne);
    }
    Ok(((1.0 - p) / den).norm())
}

/// `|(p − q̄)/(p + q)|`. With `q = 1` this is [`becker_dilatation`], bit for bit.
pub fn betker_dilatation(p: Complex64, q: Complex64) -> Result<f64> {
    let den = p + q;
    if den == Complex64::default() {
        return Err(Error::DegenerateDenominator);
    }
    Ok(((p - q.conj()) / den).norm())
}

/// The chain `f_t(z) = f(z) + t z` of a member of ℝ.
#[derive(Debug, Clone)]
pub struct ChainR<F> {
    f: F,
}

pub const CHAIN_GRID: (usize, usize, f64) = (64, 256, 0.9999);

impl ChainR<Function> {
    pub fn from_spec(spec: &FunctionSpec) -> Result<Self> {
        ChainR::new(spec.compile()?)
    }
}

impl<F: Analytic> ChainR<F> {
    /// Checks `f(0) = 0`, `f'(0) = 1` and `Re p(z, 0) > 0` on the
    /// verification grid, which gives `Re p > 0` for every `t ≥ 0`.
    pub fn new(f: F) -> Result<Self> {
        let j = f.jet(Complex64::default())?;
        if j.f0.norm() > 1e-12 {
            return Err(Error::NotNormalized { what: "f(0) = 0", found: j.f0 });
        }
        if (j.f1 - 1.0).norm() > 1e-12 {
            return Err(Error::NotNormalized { what: "f'(0) = 1", found: j.f1 });
        }
        let chain = Self { f };
        let (n_r, n_t, r_max) = CHAIN_GRID;
        for z in verification_grid(n_r, n_t, r_max) {
            let p = chain.herglotz(z, 0.0)?;
            if !(p.re > 0.0) {
                return Err(Error::NotHerglotz { z, t: 0.0, value: p.re });
            }
        }
        Ok(chain)
    }

    pub fn function(&self) -> &F {
        &self.f
    }

    /// Leading coefficient `a₁(t) = 1 + t` of `f_t`.
    pub fn a1(&self, t: f64) -> f64 {
        1.0 + t
    }

    pub fn value(&self, z: Complex64, t: f64) -> Result<Complex64> {
        Ok(self.f.value(z)? + t * z)
    }

    pub fn herglotz(&self, z: Complex64, t: f64) -> Result<Complex64> {
        herglotz_of_chain_r(&self.f, z, t)
    }

    /// `(min Re p, max |arg p|)` over the given points.
    pub fn herglotz_extremes(&self, points: &[Complex64], t: f64) -> Result<(f64, f64)> {
        let mut min_re = f64::INFINITY;
        let mut max_arg = 0.0f64;
        for &z in points {
            let p = self.herglotz(z, t)?;
            min_re = min_re.min(p.re);
            max_arg = max_arg.max(p.arg().abs());
        }
        Ok((min_re, max_arg))
    }
}

/// The chain `f_t = e^{e^{iλ}t} f` of a `λ`-spirallike map, with inverse
/// chain `ω_t = f⁻¹(e^{−e^{iλ}t} f)`.
#[derive(Debug, Clone)]
pub struct SpirallikeChain<F> {
    f: F,
    lambda: f64,
}

pub const SPIRAL_GRID: (usize, usize, f64) = (64, 256, 0.9999);

impl SpirallikeChain<Function> {
    pub fn from_spec(spec: &FunctionSpec, lambda: f64) -> Result<Self> {
        SpirallikeChain::new(spec.compile()?, lambda)
    }
}

impl<F: Analytic> SpirallikeChain<F> {
    /// Checks `Re(e^{−iλ} z f'/f) > 0` on the verification grid.
    pub fn new(f: F, lambda: f64) -> Result<Self> {
        if !(lambda.abs() < FRAC_PI_2) {
            return Err(Error::BadParameter(format!("lambda = {lambda} must lie in (-pi/2, pi/2)")));
        }
        let chain = Self { f, lambda };
        let (n_r, n_t, r_max) = SPIRAL_GRID;
        // z f'/f → 1 at the origin, where the formula is 0/0
        for z in verification_grid(n_r, n_t, r_max).into_iter().skip(1) {
            let v = chain.spiral_quotient(z)?.re;
            if !(v > 0.0) {
                return Err(Error::NotSpirallike { lambda, z, value: v });
            }
        }
        Ok(chain)
    }

    pub fn function(&self) -> &F {
        &self.f
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.lambda)
    }

    /// `e^{−iλ} z f'(z)/f(z)`.
    pub fn spiral_quotient(&self, z: Complex64) -> Result<Complex64> {
        let j = self.f.jet(z)?;
        if !(j.f0.norm() >= 1e-300) {
            return Err(Error::ZeroValue(j.f0));
        }
        Ok(self.rotation().conj() * z * j.f1 / j.f0)
    }

    pub fn flow(&self, z: Complex64, t: f64) -> Result<Complex64> {
        Ok((self.rotation() * t).exp() * self.f.value(z)?)
    }

    /// `ω_t(z)` by Newton continuation in `t`.
    pub fn inverse_flow(&self, z: Complex64, t: f64) -> Result<Complex64> {
        const STEPS: usize = 32;
        let fz = self.f.value(z)?;
        let mut u = z;
        for s in 1..=STEPS {
            let target = (-self.rotation() * (t * s as f64 / STEPS as f64)).exp() * fz;
            let mut converged = false;
            for _ in 0..60 {
                let j = self.f.jet(u)?;
                if !(j.f1.norm() >= 1e-300) {
                    return Err(Error::CriticalPoint(u));
                }
                let du = (j.f0 - target) / j.f1;
                u -= du;
                if !(u.norm() < 1.0) {
                    return Err(Error::NewtonDivergence { z, residual: du.norm() });
                }
                if du.norm() <= 1e-15 * (1.0 + u.norm()) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                let residual = (self.f.value(u)? - target).norm();
                if residual > 1e-12 * (1.0 + target.norm()) {
                    return Err(Error::NewtonDivergence { z, residual });
                }
            }
        }
        Ok(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub id: String,
    pub statement: String,
    /// `None` when the measurement could not be made.
    pub measured: Option<f64>,
    pub threshold: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    #[serde(with = "complex_pair")]
    pub alpha: Complex64,
    pub items: Vec<CriterionVerdict>,
}

impl CriteriaReport {
    pub fn item(&self, id: &str) -> Option<&CriterionVerdict> {
        self.items.iter().find(|c| c.id == id)
    }

    pub fn verdict(&self, id: &str) -> Option<Verdict> {
        self.item(id).map(|c| c.verdict)
    }
}

fn paper_constants() -> Result<PaperConstants> {
    static CONSTANTS: OnceLock<std::result::Result<PaperConstants, Error>> = OnceLock::new();
    CONSTANTS.get_or_init(PaperConstants::compute).clone()
}

#[derive(Clone, Copy)]
enum Cmp {
    Above,
    Below,
    AtMost,
}

struct ItemBuilder {
    items: Vec<CriterionVerdict>,
}

impl ItemBuilder {
    fn measured(&mut self, id: &str, statement: &str, measured: Result<f64>, threshold: f64, cmp: Cmp) {
        self.gated(id, statement, measured, threshold, cmp, None);
    }

    /// Like `measured`, but the verdict is `Fail` with the given note when a
    /// hypothesis of the underlying theorem is not met.
    fn gated(&mut self, id: &str, statement: &str, measured: Result<f64>, threshold: f64, cmp: Cmp, unmet: Option<String>) {
        let (measured, verdict, note) = match measured {
            Ok(m) => {
                let ok = match cmp {
                    Cmp::Above => m > threshold,
                    Cmp::Below => m < threshold,
                    Cmp::AtMost => m <= threshold,
                };
                match unmet {
                    Some(why) => (Some(m), Verdict::Fail, Some(why)),
                    None => (Some(m), if ok { Verdict::Pass } else { Verdict::Fail }, None),
                }
            }
            Err(e) => (None, Verdict::Inconclusive, Some(e.to_string())),
        };
        self.items.push(CriterionVerdict {
            id: id.into(),
            statement: statement.into(),
            measured,
            threshold,
            verdict,
            note,
        });
    }
}

/// `(min Re f', max |arg f'|)` over the grid of `opts`.
fn derivative_scan<F: Analytic + ?Sized>(f: &F, opts: &NormOptions) -> Result<(f64, f64)> {
    let radii = opts.radii();
    let angles = opts.angles();
    let points: Vec<Complex64> = radii
        .iter()
        .flat_map(|&r| angles.iter().map(move |&t| Complex64::from_polar(r, t)))
        .collect();
    let values: Vec<Result<Complex64>> = points.par_iter().map(|&z| Ok(f.jet(z)?.f1)).collect();
    let mut min_re = f64::INFINITY;
    let mut max_arg = 0.0f64;
    for v in values {
        let d = v?;
        if d.norm() < crate::analytic::CRITICAL_THRESHOLD {
            return Err(Error::CriticalPoint(d));
        }
        min_re = min_re.min(d.re);
        max_arg = max_arg.max(d.arg().abs());
    }
    Ok((min_re, max_arg))
}

/// Verdicts of the univalence and extension criteria for `f`, and of the
/// parameter ranges for `J_α[f]` and `I_α[f]` at the given `α`.
///
/// Failed measurements make the affected items inconclusive. The `α` items
/// that presuppose `f ∈ ℝ` fail when the Noshiro–Warschawski scan does not
/// establish membership.
pub fn criteria_report<F: Analytic + ?Sized>(f: &F, alpha: Complex64, opts: &NormOptions) -> CriteriaReport {
    let mut b = ItemBuilder { items: Vec::new() };
    let scan = derivative_scan(f, opts);
    let min_re = scan.as_ref().map(|s| s.0).map_err(Clone::clone);
    let gamma = scan.as_ref().map(|s| s.1 / FRAC_PI_2).map_err(Clone::clone);
    let in_r = matches!(min_re, Ok(m) if m > 0.0);

    b.measured("noshiro_warschawski", "min Re f' > 0 (f in R, univalent)", min_re, 0.0, Cmp::Above);
    b.measured("sector_gamma", "gamma = (2/pi) max |arg f'| below 1", gamma.clone(), 1.0, Cmp::Below);
    b.measured(
        "sector_qc_bound",
        "sin(gamma pi/2) below 1 gives a sin(gamma pi/2)-quasiconformal extension",
        gamma.map(|g| (g * FRAC_PI_2).sin()),
        1.0,
        Cmp::Below,
    );

    let t_norm = norm(f, FieldKind::PreSchwarzian, opts).map(|r| r.value);
    b.measured("becker_univalence", "||T_f|| <= 1 (univalent)", t_norm.clone(), 1.0, Cmp::AtMost);
    b.measured("becker_qc", "k = ||T_f|| < 1 (k-quasiconformal extension)", t_norm, 1.0, Cmp::Below);
    let s_norm = norm(f, FieldKind::Schwarzian, opts).map(|r| r.value);
    b.measured("nehari", "||S_f|| <= 2 (univalent)", s_norm, 2.0, Cmp::AtMost);

    let a = alpha.norm();
    let real = alpha.im == 0.0;
    let needs_r = || (!in_r).then(|| "requires f in R".to_string());
    let needs_real_r = || {
        if !real {
            Some("requires real alpha".to_string())
        } else {
            needs_r()
        }
    };
    b.measured("kim_merkes_pfaltzgraff", "|alpha| <= 1/4 (J_alpha, I_alpha preserve S)", Ok(a), 0.25, Cmp::AtMost);
    match paper_constants() {
        Ok(c) => {
            b.gated("j_alpha_univalence", "|alpha| <= 1/h(r0) (J_alpha[f] univalent)", Ok(a), c.inv_h_r0, Cmp::AtMost, needs_r());
            b.gated(
                "j_alpha_qc",
                "k = |alpha| h(r0) < 1 (J_alpha[f] k'-quasiconformal for k' > k)",
                Ok(a * c.h_r0),
                1.0,
                Cmp::Below,
                needs_r(),
            );
            b.gated("j_alpha_class_r", "|alpha| <= alpha0 (J_alpha[f] in R)", Ok(a), c.alpha0, Cmp::AtMost, needs_real_r());
            b.gated(
                "j_alpha_dilatation",
                "|alpha| < alpha0; J_alpha[f] has a sin(|alpha| beta0 pi/2)-quasiconformal extension",
                Ok((a * c.beta0 * FRAC_PI_2).sin()),
                1.0,
                Cmp::Below,
                if a < c.alpha0 { needs_real_r() } else { Some(format!("|alpha| >= alpha0 = {}", c.alpha0)) },
            );
        }
        Err(e) => {
            for id in ["j_alpha_univalence", "j_alpha_qc", "j_alpha_class_r", "j_alpha_dilatation"] {
                b.measured(id, "constants unavailable", Err(e.clone()), f64::NAN, Cmp::AtMost);
            }
        }
    }
    b.gated("i_alpha_class_r", "|alpha| <= 1 (I_alpha[f] in R)", Ok(a), 1.0, Cmp::AtMost, needs_real_r());
    b.gated("i_alpha_univalence", "|alpha| <= 1/2 (I_alpha[f] univalent)", Ok(a), 0.5, Cmp::AtMost, needs_r());
    b.gated(
        "i_alpha_dilatation",
        "|alpha| < 1; I_alpha[f] has a sin(|alpha| pi/2)-quasiconformal extension",
        Ok((a * FRAC_PI_2).sin()),
        1.0,
        Cmp::Below,
        if a < 1.0 { needs_real_r() } else { Some("|alpha| >= 1".into()) },
    );
    CriteriaReport { alpha, items: b.items }
}

pub fn criteria_report_spec(spec: &FunctionSpec, alpha: Complex64, opts: &NormOptions) -> Result<CriteriaReport> {
    Ok(criteria_report(&spec.compile()?, alpha, opts))
}

/// Number of nodes of the boundary table used to seed the flow solver.
pub const BOUNDARY_NODES: usize = 4096;
const NEWTON_MAX_ITER: usize = 60;
const NEWTON_TOL: f64 = 1e-13;
/// Largest accepted residual of the flow equation in log coordinates.
pub const NEWTON_ACCEPT: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
struct BoundaryNode {
    theta: f64,
    /// `Im(e^{−iλ} log f(e^{iθ})) / cos λ`, defined modulo 2π.
    lambda_arg: f64,
}

/// Solution of `e^{e^{iλ}t} f(1/z̄) = f(e^{iθ})` and the extended value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionValue {
    #[serde(with = "complex_pair")]
    pub phi: Complex64,
    pub t: f64,
    pub theta: f64,
    /// Modulus of the flow-equation residual in log coordinates.
    pub residual: f64,
}

/// `Φ` for a fixed spirallike chain, with a tabulated boundary curve.
pub struct SpirallikeExtension<F> {
    chain: SpirallikeChain<F>,
    table: Vec<BoundaryNode>,
    alpha_hat: f64,
}

impl SpirallikeExtension<Function> {
    pub fn from_spec(spec: &FunctionSpec, lambda: f64) -> Result<Self> {
        Ok(Self::new(SpirallikeChain::from_spec(spec, lambda)?))
    }
}

impl<F: Analytic> SpirallikeExtension<F> {
    pub fn new(chain: SpirallikeChain<F>) -> Self {
        let rot = chain.rotation();
        let cos = chain.lambda.cos();
        let nodes: Vec<(Option<BoundaryNode>, Option<f64>)> = (0..BOUNDARY_NODES)
            .into_par_iter()
            .map(|k| {
                // half-step offset keeps the nodes off singularities at rational angles
                let theta = TAU * (k as f64 + 0.5) / BOUNDARY_NODES as f64;
                let z = Complex64::from_polar(1.0, theta);
                let node = chain.f.value(z).ok().filter(|w| w.is_finite() && w.norm() > 0.0).map(|w| BoundaryNode {
                    theta,
                    lambda_arg: (rot.conj() * w.ln()).im / cos,
                });
                let sector = chain.spiral_quotient(z).ok().filter(|q| q.is_finite()).map(|q| q.arg().abs());
                (node, sector)
            })
            .collect();
        let max_arg = nodes.iter().filter_map(|n| n.1).fold(0.0, f64::max);
        let table = nodes.into_iter().filter_map(|n| n.0).collect();
        Self { chain, table, alpha_hat: (max_arg / FRAC_PI_2).min(1.0) }
    }

    pub fn chain(&self) -> &SpirallikeChain<F> {
        &self.chain
    }

    /// `α̂ = (2/π) max |arg(e^{−iλ} z f'/f)|` over the boundary table.
    pub fn alpha_hat(&self) -> f64 {
        self.alpha_hat
    }

    /// `sin(πα̂/2)`.
    pub fn k_bound(&self) -> f64 {
        (self.alpha_hat * FRAC_PI_2).sin()
    }

    /// Flow coordinates `(t, θ)` from the boundary table: the node where the
    /// `λ`-argument of the boundary curve crosses that of `w0`.
    fn seed(&self, w0: Complex64) -> Option<(f64, f64)> {
        let cos = self.chain.lambda.cos();
        let target = (self.chain.rotation().conj() * w0.ln()).im / cos;
        let n = self.table.len();
        let mut best: Option<(f64, f64)> = None;
        for k in 0..n {
            let (a, b) = (self.table[k], self.table[(k + 1) % n]);
            let (da, db) = (wrap_angle(a.lambda_arg - target), wrap_angle(b.lambda_arg - target));
            let jump = (db - da).abs();
            if da * db > 0.0 || jump >= std::f64::consts::PI || (da == 0.0 && db == 0.0) {
                continue;
            }
            let mut tb = b.theta;
            if tb < a.theta {
                tb += TAU;
            }
            let s = if db == da { 0.0 } else { -da / (db - da) };
            let theta = a.theta + s * (tb - a.theta);
            if best.is_none_or(|(j, _)| jump < j) {
                best = Some((jump, theta));
            }
        }
        let (_, theta) = best?;
        let fb = self.chain.f.value(Complex64::from_polar(1.0, theta)).ok()?;
        Some(((fb.norm().ln() - w0.norm().ln()) / cos, theta))
    }

    /// `log f(e^{iθ}) − log w0 − e^{iλ}t` with the imaginary part wrapped,
    /// `z f'/f` at `e^{iθ}`, and `f(e^{iθ})`.
    fn residual(&self, l0: Complex64, t: f64, theta: f64) -> Result<(Complex64, Complex64, Complex64)> {
        let z = Complex64::from_polar(1.0, theta);
        let j = self.chain.f.jet(z)?;
        if !(j.f0.norm() >= 1e-300) || !j.f0.is_finite() || !j.f1.is_finite() {
            return Err(Error::domain(z, "boundary value is zero or not finite"));
        }
        let mut r = j.f0.ln() - l0 - self.chain.rotation() * t;
        r.im = wrap_angle(r.im);
        Ok((r, z * j.f1 / j.f0, j.f0))
    }

    fn newton(&self, z: Complex64, w0: Complex64, (mut t, mut theta): (f64, f64)) -> Result<ExtensionValue> {
        let l0 = w0.ln();
        let (cos, sin) = (self.chain.lambda.cos(), self.chain.lambda.sin());
        let (mut r, mut u, mut fb) = self.residual(l0, t, theta)?;
        for _ in 0..NEWTON_MAX_ITER {
            if r.norm() <= NEWTON_TOL {
                break;
            }
            // columns ∂/∂t = −e^{iλ}, ∂/∂θ = i z f'/f
            let (a, bb, c, d) = (-cos, -u.im, -sin, u.re);
            let det = a * d - bb * c;
            if !(det.abs() > 1e-300) {
                return Err(Error::NewtonDivergence { z, residual: r.norm() });
            }
            let dt = (-r.re * d + bb * r.im) / det;
            let dth = (-a * r.im + c * r.re) / det;
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                if let Ok(next) = self.residual(l0, t + step * dt, theta + step * dth) {
                    if next.0.norm() < r.norm() {
                        t += step * dt;
                        theta += step * dth;
                        (r, u, fb) = next;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        let residual = r.norm();
        if !(residual <= NEWTON_ACCEPT) {
            return Err(Error::NewtonDivergence { z, residual });
        }
        Ok(ExtensionValue { phi: fb * fb / w0, t, theta: theta.rem_euclid(TAU), residual })
    }

    /// `Φ(z)` for `|z| > 1`.
    pub fn eval(&self, z: Complex64) -> Result<ExtensionValue> {
        self.eval_seeded(z, None)
    }

    /// As [`eval`](Self::eval), starting Newton from `(t, θ)` when given and
    /// falling back to the boundary table.
    pub fn eval_seeded(&self, z: Complex64, seed: Option<(f64, f64)>) -> Result<ExtensionValue> {
        if !(z.norm() > 1.0) || !z.is_finite() {
            return Err(Error::domain(z, "the extension is evaluated outside the closed disk"));
        }
        let w0 = self.chain.f.value(z.conj().inv())?;
        if let Some(s) = seed {
            if let Ok(v) = self.newton(z, w0, s) {
                return Ok(v);
            }
        }
        let s = self.seed(w0).ok_or(Error::NewtonDivergence { z, residual: f64::INFINITY })?;
        self.newton(z, w0, s)
    }

    /// `Φ` on the whole plane.
    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() <= 1.0 {
            self.chain.f.value(z)
        } else {
            Ok(self.eval(z)?.phi)
        }
    }
}

/// `Φ(z)` and its flow coordinates for a single exterior point.
pub fn spirallike_extension(spec: &FunctionSpec, lambda: f64, z: Complex64) -> Result<ExtensionValue> {
    SpirallikeExtension::from_spec(spec, lambda)?.eval(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionOptions {
    pub r_out_max: f64,
    pub n_r: usize,
    pub n_theta: usize,
    /// Finite-difference step relative to `|z|`.
    pub fd_step: f64,
    /// Radial offset of the pairs `(1 − δ)e^{iθ}`, `(1 + δ)e^{iθ}` of the continuity check.
    pub continuity_delta: f64,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        Self { r_out_max: 3.0, n_r: 50, n_theta: 180, fd_step: 1e-4, continuity_delta: 1e-4 }
    }
}

impl ExtensionOptions {
    fn validate(&self) -> Result<()> {
        if !(self.r_out_max > 1.0) {
            return Err(Error::BadParameter(format!("r_out_max = {} must exceed 1", self.r_out_max)));
        }
        if self.n_r == 0 || self.n_theta == 0 {
            return Err(Error::BadParameter("grid sizes must be positive".into()));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.1) {
            return Err(Error::BadParameter(format!("fd_step = {} must lie in (0, 0.1)", self.fd_step)));
        }
        if !(self.continuity_delta > 0.0 && self.continuity_delta < 1.0) {
            return Err(Error::BadParameter("continuity_delta must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Radii `1 + (r_out_max − 1) i/n_r`, `i = 1..=n_r`.
    pub fn radii(&self) -> Vec<f64> {
        (1..=self.n_r).map(|i| 1.0 + (self.r_out_max - 1.0) * i as f64 / self.n_r as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionPoint {
    #[serde(with = "complex_pair")]
    pub z: Complex64,
    #[serde(with = "complex_pair")]
    pub phi: Complex64,
    /// Estimated `|μ|`; NaN for failed cells and cells too close to the circle.
    pub mu_abs: f64,
    pub t: f64,
    pub theta: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionSummary {
    pub k_bound: f64,
    /// NaN when no cell produced a dilatation.
    pub max_mu: f64,
    pub failures: usize,
    pub total: usize,
    pub alpha_hat: f64,
    pub lambda: f64,
    /// `max |Φ((1+δ)e^{iθ}) − f((1−δ)e^{iθ})|` over the angular grid;
    /// infinite if `Φ` could not be evaluated at some angle.
    pub boundary_gap: f64,
    /// Smallest distance between extended values of distinct cells.
    pub min_separation: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionGrid {
    pub points: Vec<ExtensionPoint>,
    pub summary: ExtensionSummary,
}

impl ExtensionGrid {
    /// Fraction of cells where the flow equation was solved.
    pub fn success_rate(&self) -> f64 {
        1.0 - self.summary.failures as f64 / self.summary.total as f64
    }

    /// Samples `Φ` on the exterior grid without aborting on failures.
    pub fn compute<F: Analytic>(ext: &SpirallikeExtension<F>, opts: &ExtensionOptions) -> Result<Self> {
        opts.validate()?;
        let radii = opts.radii();
        let cells: Vec<Complex64> = radii
            .iter()
            .flat_map(|&r| (0..opts.n_theta).map(move |j| Complex64::from_polar(r, TAU * j as f64 / opts.n_theta as f64)))
            .collect();
        let results: Vec<(ExtensionPoint, Option<String>)> = cells.par_iter().map(|&z| cell(ext, z, opts)).collect();
        let total = results.len();
        let first_failure = results.iter().find_map(|r| r.1.clone());
        let points: Vec<ExtensionPoint> = results.into_iter().map(|r| r.0).collect();
        let failures = points.iter().filter(|p| !p.ok).count();
        let max_mu = points.iter().filter(|p| p.ok && p.mu_abs.is_finite()).map(|p| p.mu_abs).fold(f64::NAN, f64::max);
        let boundary_gap = boundary_gap(ext, opts);
        let min_separation = min_separation(points.iter().filter(|p| p.ok).map(|p| p.phi).collect());
        Ok(Self {
            points,
            summary: ExtensionSummary {
                k_bound: ext.k_bound(),
                max_mu,
                failures,
                total,
                alpha_hat: ext.alpha_hat(),
                lambda: ext.chain().lambda(),
                boundary_gap,
                min_separation,
                first_failure,
            },
        })
    }
}

fn cell<F: Analytic>(ext: &SpirallikeExtension<F>, z: Complex64, opts: &ExtensionOptions) -> (ExtensionPoint, Option<String>) {
    let failed = |e: Error| {
        let p = ExtensionPoint {
            z,
            phi: Complex64::new(f64::NAN, f64::NAN),
            mu_abs: f64::NAN,
            t: f64::NAN,
            theta: f64::NAN,
            ok: false,
        };
        (p, Some(format!("z = {z}: {e}")))
    };
    let center = match ext.eval(z) {
        Ok(v) => v,
        Err(e) => return failed(e),
    };
    let h = opts.fd_step * z.norm();
    let mu_abs = if z.norm() - 1.0 <= 2.0 * h {
        f64::NAN
    } else {
        let seed = Some((center.t, center.theta));
        let at = |dz: Complex64| ext.eval_seeded(z + dz, seed).map(|v| v.phi);
        let i = Complex64::i();
        let stencil = (|| -> Result<f64> {
            let px = (at(Complex64::new(h, 0.0))? - at(Complex64::new(-h, 0.0))?) / (2.0 * h);
            let py = (at(i * h)? - at(-i * h)?) / (2.0 * h);
            let dz = 0.5 * (px - i * py);
            let dzbar = 0.5 * (px + i * py);
            Ok((dzbar / dz).norm())
        })();
        match stencil {
            Ok(m) => m,
            Err(e) => return failed(e),
        }
    };
    let p = ExtensionPoint { z, phi: center.phi, mu_abs, t: center.t, theta: center.theta, ok: true };
    (p, None)
}

fn boundary_gap<F: Analytic>(ext: &SpirallikeExtension<F>, opts: &ExtensionOptions) -> f64 {
    let d = opts.continuity_delta;
    (0..opts.n_theta)
        .into_par_iter()
        .map(|j| {
            let u = Complex64::from_polar(1.0, TAU * j as f64 / opts.n_theta as f64);
            let inner = ext.chain().function().value((1.0 - d) * u);
            let outer = ext.eval((1.0 + d) * u);
            match (inner, outer) {
                (Ok(a), Ok(b)) => (b.phi - a).norm(),
                _ => f64::INFINITY,
            }
        })
        .reduce(|| 0.0, f64::max)
}

fn min_separation(mut values: Vec<Complex64>) -> f64 {
    values.sort_by(|a, b| a.re.total_cmp(&b.re));
    let mut best = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            if values[j].re - values[i].re >= best {
                break;
            }
            best = best.min((values[j] - values[i]).norm());
        }
    }
    best
}

/// [`ExtensionGrid::compute`], failing when more than 1% of the cells fail.
pub fn extension_grid(spec: &FunctionSpec, lambda: f64, opts: &ExtensionOptions) -> Result<ExtensionGrid> {
    let ext = SpirallikeExtension::from_spec(spec, lambda)?;
    let grid = ExtensionGrid::compute(&ext, opts)?;
    let s = &grid.summary;
    if s.failures * 100 > s.total {
        return Err(Error::TooManyFailures {
            failed: s.failures,
            total: s.total,
            first: s.first_failure.clone().unwrap_or_default(),
        });
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn herglotz_examples() {
        let id = Function::expr("z").unwrap();
        let p = herglotz_of_chain_r(&id, c64(0.3, -0.2), 2.0).unwrap();
        assert!((p - c64(1.0 / 3.0, 0.0)).norm() < 1e-15);
        let phi = Function::catalog("phi", &[]).unwrap();
        assert!((herglotz_of_chain_r(&phi, c64(0.0, 0.0), 0.0).unwrap() - 1.0).norm() < 1e-15);
        assert!((herglotz_of_chain_r(&phi, c64(0.5, 0.0), 1.0).unwrap() - 0.25).norm() < 1e-15);
        let neg = Function::expr("-z").unwrap();
        assert_eq!(herglotz_of_chain_r(&neg, c64(0.1, 0.0), 1.0), Err(Error::DivergentP { z: c64(0.1, 0.0), t: 1.0 }));
    }

    #[test]
    fn dilatation_examples() {
        assert_eq!(becker_dilatation(c64(1.0, 0.0)).unwrap(), 0.0);
        let p = Complex64::from_polar(1.0, FRAC_PI_4);
        assert!((becker_dilatation(p).unwrap() - FRAC_PI_8.tan()).abs() < 1e-15);
        assert!((becker_dilatation(c64(3.0, 0.0)).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(becker_dilatation(c64(-1.0, 0.0)), Err(Error::PoleAtMinusOne));
        assert!((betker_dilatation(p, p).unwrap() - FRAC_PI_4.sin()).abs() < 1e-15);
        assert_eq!(betker_dilatation(c64(2.5, 0.0), c64(2.5, 0.0)).unwrap(), 0.0);
        assert_eq!(betker_dilatation(p, -p), Err(Error::DegenerateDenominator));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let p = c64(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            assert_eq!(betker_dilatation(p, c64(1.0, 0.0)), becker_dilatation(p));
        }
    }

    #[test]
    fn chain_r_checks_membership() {
        let chain = ChainR::from_spec(&FunctionSpec::catalog("phi")).unwrap();
        assert_eq!(chain.a1(2.0), 3.0);
        assert!((chain.value(c64(0.5, 0.0), 1.0).unwrap() - (-0.5 - 2.0 * 0.5f64.ln() + 0.5)).norm() < 1e-14);
        assert!(matches!(ChainR::from_spec(&FunctionSpec::catalog("koebe")), Err(Error::NotHerglotz { .. })));
        assert!(matches!(ChainR::from_spec(&FunctionSpec::expr("1+z")), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn spirallike_chain_checks() {
        assert!(SpirallikeChain::from_spec(&FunctionSpec::catalog("spiral-koebe"), FRAC_PI_4).is_ok());
        assert!(SpirallikeChain::from_spec(&FunctionSpec::catalog("krzyz-lewandowski"), -FRAC_PI_4).is_ok());
        assert!(matches!(
            SpirallikeChain::from_spec(&FunctionSpec::catalog("krzyz-lewandowski"), FRAC_PI_4),
            Err(Error::NotSpirallike { .. })
        ));
        assert!(matches!(SpirallikeChain::from_spec(&FunctionSpec::catalog("koebe"), 2.0), Err(Error::BadParameter(_))));
    }

    #[test]
    fn inverse_flow_of_starlike_maps() {
        let id = SpirallikeChain::from_spec(&FunctionSpec::expr("z"), 0.0).unwrap();
        let w = id.inverse_flow(c64(0.4, 0.3), 0.7).unwrap();
        assert!((w - c64(0.4, 0.3) * (-0.7f64).exp()).norm() < 1e-14);
        let k = SpirallikeChain::from_spec(&FunctionSpec::catalog("koebe"), 0.0).unwrap();
        let z = c64(-0.2, 0.5);
        let w = k.inverse_flow(z, 1.3).unwrap();
        let back = k.flow(w, 1.3).unwrap();
        assert!((back - k.function().value(z).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn identity_extends_to_identity() {
        let ext = SpirallikeExtension::from_spec(&FunctionSpec::expr("z"), 0.0).unwrap();
        assert!(ext.alpha_hat() < 1e-12);
        let z = c64(1.7, -0.4);
        let v = ext.eval(z).unwrap();
        assert!((v.phi - z).norm() < 1e-12, "{}", v.phi);
        assert!((v.t - z.norm().ln()).abs() < 1e-12);
        assert!((v.theta - z.arg().rem_euclid(TAU)).abs() < 1e-12);
    }

    #[test]
    fn koebe_is_matched_along_its_real_ray() {
        // K(1/2) = 2 lies on the positive axis, whose preimage ray is θ → 0
        let ext = SpirallikeExtension::from_spec(&FunctionSpec::catalog("koebe"), 0.0).unwrap();
        assert!(ext.alpha_hat() > 0.999);
        // off the slit direction the flow line never meets the boundary curve
        assert!(matches!(ext.eval(c64(0.0, 2.0)), Err(Error::NewtonDivergence { .. })));
    }

    #[test]
    fn strict_sector_extension_is_consistent() {
        let spec = FunctionSpec::expr("z/(1-0.5*z)");
        let ext = SpirallikeExtension::from_spec(&spec, 0.0).unwrap();
        // z f'/f = 1/(1 − z/2) has |arg| ≤ arcsin(1/2) = π/6 on the circle
        assert!((ext.alpha_hat() - 1.0 / 3.0).abs() < 1e-5, "{}", ext.alpha_hat());
        let f = spec.compile().unwrap();
        for z in [c64(1.5, 0.8), c64(-2.0, 0.1), c64(0.0, -2.9)] {
            let v = ext.eval(z).unwrap();
            let fb = f.value(Complex64::from_polar(1.0, v.theta)).unwrap();
            let flowed = (Complex64::from(v.t)).exp() * fb;
            // Φ = e^{t} f(e^{iθ}) as well, for λ = 0
            assert!((flowed - v.phi).norm() < 1e-9 * v.phi.norm(), "{z}");
            assert!(v.t > 0.0);
        }
    }

    #[test]
    fn strict_sector_grid() {
        let ext = SpirallikeExtension::from_spec(&FunctionSpec::expr("z/(1-0.5*z)"), 0.0).unwrap();
        let opts = ExtensionOptions { n_r: 10, n_theta: 36, ..Default::default() };
        let grid = ExtensionGrid::compute(&ext, &opts).unwrap();
        let s = &grid.summary;
        assert_eq!(s.failures, 0);
        assert!(s.max_mu <= s.k_bound + 0.05, "{} vs {}", s.max_mu, s.k_bound);
        assert!(s.boundary_gap <= 1e-3, "{}", s.boundary_gap);
        assert!(s.min_separation > 1e-9);
    }

    #[test]
    fn identity_report_passes_everything() {
        let id = Function::expr("z").unwrap();
        let opts = NormOptions { n_radial: 20, n_angular: 40, ..Default::default() };
        let r = criteria_report(&id, c64(0.2, 0.0), &opts);
        for item in &r.items {
            assert_eq!(item.verdict, Verdict::Pass, "{item:?}");
        }
        assert_eq!(r.item("noshiro_warschawski").unwrap().measured, Some(1.0));
        assert_eq!(r.item("sector_gamma").unwrap().measured, Some(0.0));
        assert_eq!(r.item("becker_univalence").unwrap().measured, Some(0.0));
    }

    #[test]
    fn report_marks_failed_evaluations_inconclusive() {
        // log(z) cannot be evaluated at the origin, which is a grid point
        let f = Function::expr("z+0*log(z)").unwrap();
        let opts = NormOptions { n_radial: 10, n_angular: 20, ..Default::default() };
        let r = criteria_report(&f, c64(0.2, 0.0), &opts);
        assert_eq!(r.verdict("noshiro_warschawski"), Some(Verdict::Inconclusive));
        assert_eq!(r.verdict("j_alpha_univalence"), Some(Verdict::Fail));
    }
}
