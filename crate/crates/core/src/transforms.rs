//! The integral transforms
//!
//! ```text
//! J_α[f](z) = ∫₀ᶻ (f(u)/u)^α du,    I_α[f](z) = ∫₀ᶻ (f'(u))^α du,
//! ```
//!
//! the Alexander transform `J[f] = J_1[f]`, and the Hallenbeck–Ruscheweyh
//! dominant. Powers take the branch equal to 1 at the origin. Every
//! transform exists as a series map and as a pointwise quadrature along
//! `[0, z]` with the logarithm of the integrand continued along the path.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{power_schwarzians, Analytic};
use crate::error::{Error, Result};
use crate::funclang::{Function, FunctionSpec};
use crate::numerics::quad::{tracked_log, tracked_segment_integral};
use crate::numerics::{complex_pair, Jet3, PowerSeries, DEFAULT_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransformOp {
    #[serde(rename = "J_alpha")]
    JAlpha,
    #[serde(rename = "I_alpha")]
    IAlpha,
    #[serde(rename = "alexander")]
    Alexander,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Series,
    Pointwise,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRequest {
    pub f: FunctionSpec,
    #[serde(with = "complex_pair")]
    pub alpha: Complex64,
    pub op: TransformOp,
    pub representation: Representation,
}

const NORMALIZATION_TOL: f64 = 1e-12;

fn check_normalized(f: &PowerSeries) -> Result<()> {
    let what = "f(0) = 0 and f'(0) = 1";
    if f.order() < 1 {
        return Err(Error::InsufficientOrder { have: f.order(), need: 1 });
    }
    if f.coeff(0).norm() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { what, found: f.coeff(0) });
    }
    if (f.coeff(1) - 1.0).norm() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { what, found: f.coeff(1) });
    }
    Ok(())
}

/// Series of `J_α[f]` truncated at order `n` (`f` must reach order `n`).
pub fn j_alpha_series(f: &PowerSeries, alpha: Complex64, n: usize) -> Result<PowerSeries> {
    check_normalized(f)?;
    f.truncate(n)?.shift_div_z()?.pow(alpha).map(|s| s.integrate())
}

/// Series of `I_α[f]` truncated at order `n`.
pub fn i_alpha_series(f: &PowerSeries, alpha: Complex64, n: usize) -> Result<PowerSeries> {
    check_normalized(f)?;
    f.truncate(n)?.derive().pow(alpha).map(|s| s.integrate())
}

pub fn alexander_series(f: &PowerSeries, n: usize) -> Result<PowerSeries> {
    j_alpha_series(f, Complex64::new(1.0, 0.0), n)
}

/// `γ z^{−γ} ∫₀ᶻ u^{γ−1} q(u) du`, coefficientwise `γ qₙ/(γ + n)`.
pub fn hr_dominant(q: &FunctionSpec, gamma: Complex64, n: usize) -> Result<PowerSeries> {
    if !(gamma.re > 0.0) {
        return Err(Error::BadGamma(gamma));
    }
    let s = q.compile()?.series(n)?;
    if (s.coeff(0) - 1.0).norm() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { what: "q(0) = 1", found: s.coeff(0) });
    }
    Ok(PowerSeries::from_fn(n, |k| gamma * s.coeff(k) / (gamma + k as f64)))
}

/// Radius inside which the integrand base is summed from its Taylor series,
/// avoiding the cancellation in `f(z)/z` near the origin.
const BASE_SERIES_RADIUS: f64 = 0.05;
const BASE_SERIES_ORDER: usize = 48;

/// `J_α[f]`, `I_α[f]` or `J[f]` as a pointwise-evaluable analytic function.
///
/// Values come from branch-tracked quadrature. The pre-Schwarzian and
/// Schwarzian are computed from the jet of the integrand base alone, since
/// `T = α (log b)'` and `S = α (log b)'' − T²/2` do not depend on the branch.
#[derive(Debug, Clone)]
pub struct Transformed {
    f: Function,
    alpha: Complex64,
    op: TransformOp,
    base_series: Option<PowerSeries>,
}

impl Transformed {
    pub fn new(f: Function, alpha: Complex64, op: TransformOp) -> Result<Self> {
        let j0 = f.jet(Complex64::default())?;
        let what = "f(0) = 0 and f'(0) = 1";
        if j0.f0.norm() > 1e-12 {
            return Err(Error::NotNormalized { what, found: j0.f0 });
        }
        if (j0.f1 - 1.0).norm() > 1e-12 {
            return Err(Error::NotNormalized { what, found: j0.f1 });
        }
        let alpha = if op == TransformOp::Alexander { Complex64::new(1.0, 0.0) } else { alpha };
        let base_series = f.series(BASE_SERIES_ORDER + 1).ok().and_then(|s| match op {
            TransformOp::IAlpha => Some(s.derive()),
            _ => s.shift_div_z().ok(),
        });
        Ok(Self { f, alpha, op, base_series })
    }

    pub fn from_spec(spec: &FunctionSpec, alpha: Complex64, op: TransformOp) -> Result<Self> {
        Self::new(spec.compile()?, alpha, op)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn op(&self) -> TransformOp {
        self.op
    }

    /// Jet of the integrand base `f(z)/z` (for `J`) or `f'(z)` (for `I`).
    pub fn base_jet(&self, z: Complex64) -> Result<Jet3> {
        if z.norm() < BASE_SERIES_RADIUS {
            if let Some(s) = &self.base_series {
                return Ok(s.eval_jet(z));
            }
        }
        match self.op {
            TransformOp::IAlpha => Ok(self.f.derivative_jet(z)?),
            _ => self.f.jet(z)?.checked_div(&Jet3::identity(z)),
        }
    }

    fn base_value(&self, u: Complex64) -> Result<Complex64> {
        if u.norm() < BASE_SERIES_RADIUS {
            if let Some(s) = &self.base_series {
                return Ok(s.eval(u));
            }
        }
        match self.op {
            TransformOp::IAlpha => Ok(self.f.jet(u)?.f1),
            _ => Ok(self.f.value(u)? / u),
        }
    }

    /// `log b(z)` continued along `[0, z]` from `log b(0) = 0`.
    pub fn integrand_log(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::default() {
            return Ok(z);
        }
        tracked_log(|u| self.base_value(u), z)
    }

    /// Transform value by quadrature, together with the continued log.
    pub fn eval_tracked(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        if z == Complex64::default() {
            return Ok((z, z));
        }
        let r = tracked_segment_integral(|u| self.base_value(u), self.alpha, z)?;
        Ok((r.value, r.end_log))
    }

    fn derivative_from(&self, b: &Jet3, log_b: Complex64, z: Complex64) -> Result<Jet3> {
        if b.f0.norm() < 1e-300 {
            return Err(Error::ZeroValue(b.f0));
        }
        let a = self.alpha;
        let l1 = b.f1 / b.f0;
        let l2 = b.f2 / b.f0 - l1 * l1;
        let d1 = (a * log_b).exp();
        let d2 = d1 * a * l1;
        let d3 = d1 * (a * l2 + a * a * l1 * l1);
        if !d1.is_finite() {
            return Err(Error::domain(z, "transform derivative overflow"));
        }
        Ok(Jet3::new(d1, d2, d3, Complex64::default()))
    }
}

impl Analytic for Transformed {
    fn jet(&self, z: Complex64) -> Result<Jet3> {
        let (value, log_b) = self.eval_tracked(z)?;
        let d = self.derivative_from(&self.base_jet(z)?, log_b, z)?;
        Ok(Jet3::new(value, d.f0, d.f1, d.f2))
    }

    fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_tracked(z)?.0)
    }

    fn derivative_jet(&self, z: Complex64) -> Result<Jet3> {
        let log_b = self.integrand_log(z)?;
        self.derivative_from(&self.base_jet(z)?, log_b, z)
    }

    fn pre_schwarzian(&self, z: Complex64) -> Result<Complex64> {
        Ok(power_schwarzians(&self.base_jet(z)?, self.alpha, z)?.0)
    }

    fn schwarzian(&self, z: Complex64) -> Result<Complex64> {
        Ok(power_schwarzians(&self.base_jet(z)?, self.alpha, z)?.1)
    }
}

/// `J[f]` for any analytic `f`, e.g. a member of ℝ given in closed form.
/// The value comes from quadrature of `f(u)/u` along `[0, z]`; the
/// derivative channels from the jet of `f(z)/z`, so the origin itself is
/// not evaluable.
pub struct AlexanderOf<F>(pub F);

impl<F: Analytic> Analytic for AlexanderOf<F> {
    fn jet(&self, z: Complex64) -> Result<Jet3> {
        let d = self.derivative_jet(z)?;
        Ok(Jet3::new(self.value(z)?, d.f0, d.f1, d.f2))
    }

    fn value(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::default() {
            return Ok(z);
        }
        let r = tracked_segment_integral(|u| Ok(self.0.value(u)? / u), Complex64::new(1.0, 0.0), z)?;
        Ok(r.value)
    }

    fn derivative_jet(&self, z: Complex64) -> Result<Jet3> {
        self.0.jet(z)?.checked_div(&Jet3::identity(z))
    }
}

impl TransformRequest {
    /// The transform as a series of order `n`.
    pub fn series(&self, n: usize) -> Result<PowerSeries> {
        let f = self.f.compile()?.series(n)?;
        match self.op {
            TransformOp::JAlpha => j_alpha_series(&f, self.alpha, n),
            TransformOp::IAlpha => i_alpha_series(&f, self.alpha, n),
            TransformOp::Alexander => alexander_series(&f, n),
        }
    }

    pub fn pointwise(&self) -> Result<Transformed> {
        Transformed::from_spec(&self.f, self.alpha, self.op)
    }

    /// Evaluates the transform at `z` in the requested representation.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() < 1.0) {
            return Err(Error::domain(z, "transforms are evaluated inside the unit disk"));
        }
        match self.representation {
            Representation::Series => Ok(self.series(DEFAULT_ORDER)?.eval(z)),
            Representation::Pointwise => self.pointwise()?.value(z),
        }
    }
}

/// Pointwise evaluation of a transform request by quadrature.
pub fn transform_pointwise(req: &TransformRequest, z: Complex64) -> Result<Complex64> {
    TransformRequest { representation: Representation::Pointwise, ..req.clone() }.evaluate(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cat(name: &str, n: usize) -> PowerSeries {
        Function::catalog(name, &[]).unwrap().series(n).unwrap()
    }

    #[test]
    fn j_alpha_series_examples() {
        let k = cat("koebe", 64);
        let id = j_alpha_series(&k, c(0.0, 0.0), 64).unwrap();
        assert!(id.max_abs_diff(&PowerSeries::identity(64)) < 1e-15);
        let jk = j_alpha_series(&k, c(1.0, 0.0), 64).unwrap();
        for n in 1..=64 {
            assert!((jk.coeff(n) - 1.0).norm() < 1e-12);
        }
        let jphi = alexander_series(&cat("phi", 64), 64).unwrap();
        assert!((jphi.coeff(2) - 0.5).norm() < 1e-15);
        let not_normalized = PowerSeries::from_real(&[0.0, 2.0, 1.0]).unwrap();
        assert!(matches!(j_alpha_series(&not_normalized, c(1.0, 0.0), 2), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn i_alpha_series_examples() {
        let phi = cat("phi", 64);
        assert!(i_alpha_series(&phi, c(1.0, 0.0), 64).unwrap().max_abs_diff(&phi) < 1e-13);
        let psi = i_alpha_series(&phi, c(-1.0, 0.0), 64).unwrap();
        assert!(psi.max_abs_diff(&cat("psi", 64)) < 1e-12);
    }

    #[test]
    fn hr_dominant_examples() {
        let q = FunctionSpec::expr("(1+z)/(1-z)");
        let d1 = hr_dominant(&q, c(1.0, 0.0), 40).unwrap();
        assert!(d1.max_abs_diff(&cat("q-dominant", 40)) < 1e-13);
        let d2 = hr_dominant(&q, c(2.0, 0.0), 3).unwrap();
        for (n, want) in [1.0, 4.0 / 3.0, 1.0, 0.8].iter().enumerate() {
            assert!((d2.coeff(n) - want).norm() < 1e-14);
        }
        let one = hr_dominant(&FunctionSpec::expr("1"), c(0.7, 0.2), 10).unwrap();
        assert!(one.max_abs_diff(&PowerSeries::one(10)) < 1e-15);
        assert!(matches!(hr_dominant(&q, c(-1.0, 0.0), 5), Err(Error::BadGamma(_))));
    }

    #[test]
    fn pointwise_examples() {
        let k = FunctionSpec::catalog("koebe");
        let req = TransformRequest { f: k.clone(), alpha: c(1.0, 0.0), op: TransformOp::JAlpha, representation: Representation::Pointwise };
        assert!((req.evaluate(c(0.5, 0.0)).unwrap() - 1.0).norm() < 1e-13);
        let z = c(0.3, 0.2);
        let i0 = TransformRequest { f: FunctionSpec::catalog("phi"), alpha: c(0.0, 0.0), op: TransformOp::IAlpha, representation: Representation::Pointwise };
        assert!((i0.evaluate(z).unwrap() - z).norm() < 1e-15);
        let quarter = TransformRequest { alpha: c(0.25, 0.0), ..req.clone() };
        let series = TransformRequest { representation: Representation::Series, ..quarter.clone() };
        assert!((quarter.evaluate(c(0.5, 0.0)).unwrap() - series.evaluate(c(0.5, 0.0)).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn transformed_jet_matches_series_jet() {
        let t = Transformed::from_spec(&FunctionSpec::catalog("phi"), c(0.5, 0.3), TransformOp::JAlpha).unwrap();
        let s = j_alpha_series(&cat("phi", 256), c(0.5, 0.3), 256).unwrap();
        for z in [c(0.01, 0.02), c(0.3, -0.2), c(-0.4, 0.1)] {
            let (a, b) = (t.jet(z).unwrap(), s.eval_jet(z));
            for (x, y) in a.as_array().iter().zip(b.as_array()) {
                assert!((x - y).norm() < 1e-10 * (1.0 + y.norm()), "{z}: {x} vs {y}");
            }
            let d = t.derivative_jet(z).unwrap();
            assert!((t.pre_schwarzian(z).unwrap() - d.f1 / d.f0).norm() < 1e-10);
        }
    }
}
