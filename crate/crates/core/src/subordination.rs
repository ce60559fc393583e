//! Range-containment tests against convex dominants, random members of the
//! class ℝ (`Re f' > 0`), disk self-maps and the Schwarz–Pick inequality,
//! and the norm inequality `‖S_f‖ ≤ ‖S_g‖ + ‖T_ω‖·‖T_g‖` for `f' = g'∘ω`.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{pre_schwarzian_from_derivative, schwarzian_from_derivative, Analytic};
use crate::error::{Error, Result};
use crate::funclang::{Function, FunctionSpec};
use crate::norms::{norm, FieldKind, NormOptions};
use crate::numerics::poly::{horner, roots};
use crate::numerics::quad::GaussLegendre;
use crate::numerics::{complex_pair, Jet3, PowerSeries, DEFAULT_ORDER};

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Convex hull of sampled boundary values of a convex dominant.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeHull {
    pub boundary_samples: Vec<Complex64>,
    /// Vertices in counterclockwise order, collinear points removed.
    pub hull: Vec<Complex64>,
}

pub const HULL_R_MAX: f64 = 1.0 - 1e-5;
pub const HULL_SAMPLES: usize = 4096;
pub const CONTAINMENT_TOL: f64 = 1e-10;

impl RangeHull {
    pub fn from_points(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::BadParameter("hull of an empty point set".into()));
        }
        let mut pts = points.clone();
        pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        pts.dedup();
        if pts.len() < 3 {
            return Ok(Self { boundary_samples: points, hull: pts });
        }
        // Andrew's monotone chain
        let mut lower: Vec<Complex64> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2 && cross(lower[lower.len() - 1] - lower[lower.len() - 2], p - lower[lower.len() - 2]) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Complex64> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 1] - upper[upper.len() - 2], p - upper[upper.len() - 2]) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Ok(Self { boundary_samples: points, hull: lower })
    }

    /// Hull of `q(r_max e^{iθ_j})`, `j = 0..n`.
    pub fn of_function<F: Analytic + ?Sized>(q: &F, r_max: f64, n: usize) -> Result<Self> {
        let pts = (0..n)
            .map(|j| q.value(Complex64::from_polar(r_max, TAU * j as f64 / n as f64)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_points(pts)
    }

    /// Signed distance outside the hull (negative inside).
    pub fn excess(&self, w: Complex64) -> f64 {
        match self.hull.len() {
            1 => (w - self.hull[0]).norm(),
            2 => {
                let (a, b) = (self.hull[0], self.hull[1]);
                let e = b - a;
                let t = ((w - a).re * e.re + (w - a).im * e.im) / e.norm_sqr();
                (w - (a + e * t.clamp(0.0, 1.0))).norm()
            }
            n => (0..n)
                .map(|i| {
                    let (a, b) = (self.hull[i], self.hull[(i + 1) % n]);
                    -cross(b - a, w - a) / (b - a).norm()
                })
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Point-in-convex-polygon, boundary inclusive within [`CONTAINMENT_TOL`].
    pub fn contains(&self, w: Complex64) -> bool {
        self.excess(w) <= CONTAINMENT_TOL
    }

    /// Whether every sample lies on the hull boundary, as it must for the
    /// boundary of a convex domain.
    pub fn samples_convex(&self) -> bool {
        self.boundary_samples.iter().all(|&w| -self.excess(w) <= 1e-9 * (1.0 + w.norm()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubordinationCheck {
    pub subordinate: bool,
    pub center_match: bool,
    #[serde(with = "complex_pair")]
    pub worst_z: Complex64,
    /// Largest distance of a sampled value outside the hull (negative if all inside).
    pub worst_excess: f64,
    /// Set when the dominant's boundary samples are not in convex position.
    pub convexity_warning: bool,
}

/// `f(0)`, or the mean over a small circle when the origin is a removable
/// singularity of the formula.
fn center_value<F: Analytic + ?Sized>(f: &F) -> Result<Complex64> {
    match f.value(Complex64::default()) {
        Ok(v) => Ok(v),
        Err(_) => {
            let m = 8;
            let mut acc = Complex64::default();
            for k in 0..m {
                acc += f.value(Complex64::from_polar(1e-3, TAU * k as f64 / m as f64))?;
            }
            Ok(acc / m as f64)
        }
    }
}

/// Range containment `f(𝔻) ⊂ q(𝔻)` with `f(0) = q(0)`, a necessary
/// condition for `f ≺ q` that is also sufficient for univalent `q`.
/// `q` is assumed convex; its sampled boundary is checked for convex
/// position and a warning raised otherwise. `f` is sampled on a polar grid
/// of about `n_samples` points with `|z| ≤ 0.999`.
pub fn subordination_check<F, Q>(f: &F, q: &Q, n_samples: usize) -> Result<SubordinationCheck>
where
    F: Analytic + ?Sized,
    Q: Analytic + ?Sized,
{
    let hull = RangeHull::of_function(q, HULL_R_MAX, HULL_SAMPLES)?;
    let center_match = (center_value(f)? - q.value(Complex64::default())?).norm() <= 1e-10;
    let side = (n_samples as f64).sqrt().ceil().max(2.0) as usize;
    let mut worst = (Complex64::default(), f64::NEG_INFINITY);
    for i in 1..=side {
        let r = 0.999 * (FRAC_PI_2 * i as f64 / side as f64).sin();
        for j in 0..side {
            let z = Complex64::from_polar(r, TAU * j as f64 / side as f64);
            let e = hull.excess(f.value(z)?);
            if e > worst.1 {
                worst = (z, e);
            }
        }
    }
    Ok(SubordinationCheck {
        subordinate: center_match && worst.1 <= CONTAINMENT_TOL,
        center_match,
        worst_z: worst.0,
        worst_excess: worst.1,
        convexity_warning: !hull.samples_convex(),
    })
}

/// `f(z)/z` as an analytic function.
pub struct DivZ<F>(pub F);

impl<F: Analytic> Analytic for DivZ<F> {
    fn jet(&self, z: Complex64) -> Result<Jet3> {
        self.0.jet(z)?.checked_div(&Jet3::identity(z))
    }
}

/// `f ∈ ℝ` with `f'(z) = (1 + z b(z))/(1 − z b(z))` for a polynomial `b`
/// with `Σ|bₙ| ≤ 1`; `Re f' > 0` because `|z b(z)| < 1` on the disk.
///
/// `f` itself is evaluated in closed form by partial fractions over the
/// roots `ρ` of `1 − z b(z)`:
/// `f(z) = −z + Σ 2/Q'(ρ) · log(1 − z/ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RMember {
    b: Vec<Complex64>,
    roots: Vec<Complex64>,
    residues: Vec<Complex64>,
}

impl RMember {
    pub fn from_b(b: Vec<Complex64>) -> Result<Self> {
        let mass: f64 = b.iter().map(|c| c.norm()).sum();
        if mass > 1.0 + 1e-12 {
            return Err(Error::BadParameter(format!("Σ|b_n| = {mass} exceeds 1")));
        }
        // Q(z) = 1 − z b(z)
        let mut q = vec![Complex64::new(1.0, 0.0)];
        q.extend(b.iter().map(|c| -c));
        let roots = roots(&q)?;
        let residues = roots.iter().map(|&r| 2.0 / horner(&q, r).1).collect();
        Ok(Self { b, roots, residues })
    }

    /// Random member: `b` of the given degree with coefficients uniform in
    /// the unit disk, rescaled to `Σ|bₙ| ∈ [0.5, 0.99]`.
    pub fn random(seed: u64, degree: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b: Vec<Complex64> = (0..=degree)
            .map(|_| Complex64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU)))
            .collect();
        let mass: f64 = b.iter().map(|c| c.norm()).sum();
        let target = rng.gen_range(0.5..0.99);
        for c in &mut b {
            *c *= target / mass;
        }
        Self::from_b(b).expect("random coefficients give a valid member")
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    fn w_jet(&self, z: Complex64) -> Jet3 {
        let id = Jet3::identity(z);
        let mut acc = Jet3::constant(Complex64::default());
        for &c in self.b.iter().rev() {
            acc = acc * id + c;
        }
        acc * id
    }

    /// Jet of `f' = (1 + w)/(1 − w)`, `w = z b(z)`.
    fn fprime_jet(&self, z: Complex64) -> Result<Jet3> {
        let w = self.w_jet(z);
        let one = Jet3::constant(Complex64::new(1.0, 0.0));
        (one + w).checked_div(&(one - w))
    }

    pub fn series(&self, order: usize) -> Result<PowerSeries> {
        let mut w = vec![Complex64::default(); order + 1];
        for (k, &c) in self.b.iter().enumerate() {
            if k + 1 <= order {
                w[k + 1] = c;
            }
        }
        let w = PowerSeries::new(w)?;
        let one = PowerSeries::one(order);
        Ok((&one + &w).div(&(&one - &w))?.integrate().truncate(order)?)
    }
}

impl Analytic for RMember {
    fn jet(&self, z: Complex64) -> Result<Jet3> {
        let mut f = -z;
        for (&r, &a) in self.roots.iter().zip(&self.residues) {
            f += a * (1.0 - z / r).ln();
        }
        if self.roots.is_empty() {
            f = z;
        }
        let d = self.fprime_jet(z)?;
        Ok(Jet3::new(f, d.f0, d.f1, d.f2))
    }

    fn derivative_jet(&self, z: Complex64) -> Result<Jet3> {
        self.fprime_jet(z)
    }
}

/// Series of a random ℝ member at the default truncation order.
pub fn random_r_member(seed: u64, degree: usize) -> Result<PowerSeries> {
    RMember::random(seed, degree).series(DEFAULT_ORDER)
}

/// A function checked to map the disk into itself.
#[derive(Debug, Clone)]
pub struct SelfMap {
    pub spec: FunctionSpec,
    omega: Function,
}

impl SelfMap {
    /// Compiles `spec` and checks `|ω| < 1` on a polar grid with `|z| ≤ 0.9999`.
    pub fn new(spec: FunctionSpec) -> Result<Self> {
        let omega = spec.compile()?;
        for i in 0..=32 {
            let r = 0.9999 * i as f64 / 32.0;
            for j in 0..128 {
                let z = Complex64::from_polar(r, TAU * j as f64 / 128.0);
                let m = omega.value(z)?.norm();
                if !(m < 1.0) {
                    return Err(Error::NotSelfMap { z, modulus: m });
                }
            }
        }
        Ok(Self { spec, omega })
    }

    /// Random polynomial `Σ cₖ zᵏ` with `Σ|cₖ| < 0.95` and
    /// `|c₁| > Σ_{k≥2} k|cₖ|`, so `ω' ≠ 0` on the closed disk.
    pub fn random(seed: u64, degree: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let degree = degree.max(1);
        let unit = |rng: &mut ChaCha8Rng| Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
        let mut c = vec![Complex64::default(); degree + 1];
        let a0 = 0.3 * rng.gen::<f64>();
        c[0] = unit(&mut rng) * a0;
        let a1 = 0.55 * (0.95 - a0);
        c[1] = unit(&mut rng) * a1;
        if degree >= 2 {
            let raw: Vec<f64> = (2..=degree).map(|_| rng.gen::<f64>()).collect();
            let weighted: f64 = raw.iter().enumerate().map(|(i, x)| (i + 2) as f64 * x).sum();
            let scale = 0.8 * a1 * rng.gen::<f64>() / weighted.max(1e-300);
            for (i, x) in raw.iter().enumerate() {
                c[i + 2] = unit(&mut rng) * (x * scale);
            }
        }
        Self::new(FunctionSpec::series(c)).expect("coefficient bound makes a self-map")
    }

    pub fn function(&self) -> &Function {
        &self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwarzPick {
    /// `|ω'(z)|/(1 − |ω(z)|²)`.
    pub lhs: f64,
    /// `1/(1 − |z|²)`.
    pub rhs: f64,
}

pub fn schwarz_pick_check(omega: &SelfMap, z: Complex64) -> Result<SchwarzPick> {
    if !(z.norm() < 1.0) {
        return Err(Error::domain(z, "outside the unit disk"));
    }
    let j = omega.omega.jet(z)?;
    let m = j.f0.norm();
    if m >= 1.0 {
        return Err(Error::domain(z, format!("|omega(z)| = {m} is not below 1")));
    }
    Ok(SchwarzPick { lhs: j.f1.norm() / (1.0 - m * m), rhs: 1.0 / (1.0 - z.norm_sqr()) })
}

/// The function `f` with `f(0) = 0` and `f' = g'∘ω`.
pub struct PrimitiveOfComposition<'a> {
    pub g: &'a Function,
    pub omega: &'a Function,
}

impl Analytic for PrimitiveOfComposition<'_> {
    fn jet(&self, z: Complex64) -> Result<Jet3> {
        let rule = GaussLegendre::new(32);
        let mut value = Complex64::default();
        let panels = 8;
        for k in 0..panels {
            let (a, b) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
            let mut err = None;
            value += rule.integrate(a, b, |s| match self.g.jet(self.omega.value(s * z).unwrap_or_default()) {
                Ok(j) => j.f1,
                Err(e) => {
                    err.get_or_insert(e);
                    Complex64::default()
                }
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        let d = self.derivative_jet(z)?;
        Ok(Jet3::new(value * z, d.f0, d.f1, d.f2))
    }

    /// Jet of `g'∘ω` by composition; the fourth channel is not available.
    fn derivative_jet(&self, z: Complex64) -> Result<Jet3> {
        let w = self.omega.jet(z)?;
        let gp = self.g.derivative_jet(w.f0)?;
        Ok(w.compose([gp.f0, gp.f1, gp.f2, gp.f3]))
    }

    fn pre_schwarzian(&self, z: Complex64) -> Result<Complex64> {
        pre_schwarzian_from_derivative(&self.derivative_jet(z)?, z)
    }

    fn schwarzian(&self, z: Complex64) -> Result<Complex64> {
        schwarzian_from_derivative(&self.derivative_jet(z)?, z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropSchwarz {
    /// `‖S_f‖`.
    pub lhs: f64,
    /// `‖S_g‖ + ‖T_ω‖·‖T_g‖`.
    pub rhs: f64,
    pub norm_s_g: f64,
    pub norm_t_omega: f64,
    pub norm_t_g: f64,
}

/// Both sides of `‖S_f‖ ≤ ‖S_g‖ + ‖T_ω‖·‖T_g‖` for `f' = g'∘ω`.
pub fn prop_schwarz_harness(g: &FunctionSpec, omega: &SelfMap, opts: &NormOptions) -> Result<PropSchwarz> {
    let g = g.compile()?;
    let f = PrimitiveOfComposition { g: &g, omega: &omega.omega };
    let lhs = norm(&f, FieldKind::Schwarzian, opts)?.value;
    let norm_s_g = norm(&g, FieldKind::Schwarzian, opts)?.value;
    let norm_t_g = norm(&g, FieldKind::PreSchwarzian, opts)?.value;
    let norm_t_omega = norm(&omega.omega, FieldKind::PreSchwarzian, opts)?.value;
    // 0·∞ does not arise: ‖T_ω‖ = 0 exactly for affine ω
    let coupling = if norm_t_omega == 0.0 { 0.0 } else { norm_t_omega * norm_t_g };
    Ok(PropSchwarz { lhs, rhs: norm_s_g + coupling, norm_s_g, norm_t_omega, norm_t_g })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_circle(n: usize) -> RangeHull {
        RangeHull::from_points((0..n).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64)).collect()).unwrap()
    }

    #[test]
    fn hull_containment() {
        let h = unit_circle(64);
        assert_eq!(h.hull.len(), 64);
        assert!(h.contains(c(0.0, 0.0)));
        assert!(!h.contains(c(2.0, 0.0)));
        assert!(h.contains(c(1.0, 0.0)));
        assert!(h.samples_convex());
        // counterclockwise orientation
        let area: f64 = (0..h.hull.len()).map(|i| cross(h.hull[i], h.hull[(i + 1) % h.hull.len()])).sum();
        assert!(area > 0.0);
        let q = RangeHull::of_function(&Function::QDominant, HULL_R_MAX, HULL_SAMPLES).unwrap();
        assert!(q.contains(Function::QDominant.value(c(0.5, 0.0)).unwrap()));
    }

    #[test]
    fn subordination_examples() {
        let q = Function::QDominant;
        let phi_over_z = Function::expr("(-z-2*log(1-z))/z").unwrap();
        let r = subordination_check(&phi_over_z, &q, 4096).unwrap();
        assert!(r.subordinate, "{r:?}");
        assert!(!r.convexity_warning);
        assert!(subordination_check(&Function::expr("1").unwrap(), &q, 400).unwrap().subordinate);
        let far = subordination_check(&Function::expr("50+z").unwrap(), &q, 400).unwrap();
        assert!(!far.subordinate && far.worst_excess > 0.0);
    }

    #[test]
    fn r_member_constructions() {
        let id = RMember::from_b(vec![]).unwrap();
        assert!((id.value(c(0.3, 0.4)).unwrap() - c(0.3, 0.4)).norm() < 1e-15);
        let phi = RMember::from_b(vec![c(1.0, 0.0)]).unwrap();
        for z in [c(0.3, 0.4), c(-0.8, 0.1), c(0.99, 0.0)] {
            let a = phi.jet(z).unwrap();
            let b = Function::Phi.jet(z).unwrap();
            for (x, y) in a.as_array().iter().zip(b.as_array()) {
                assert!((x - y).norm() < 1e-12 * (1.0 + y.norm()));
            }
        }
        let f = RMember::random(42, 6);
        let s = f.series(256).unwrap();
        for z in [c(0.5, 0.2), c(-0.3, -0.6)] {
            assert!((s.eval(z) - f.value(z).unwrap()).norm() < 1e-11);
        }
        for i in 1..=100 {
            for j in 0..100 {
                let z = Complex64::from_polar(0.9999 * i as f64 / 100.0, TAU * j as f64 / 100.0);
                assert!(f.derivative_jet(z).unwrap().f0.re > 0.0);
            }
        }
        assert!(RMember::from_b(vec![c(0.8, 0.0), c(0.3, 0.0)]).is_err());
    }

    #[test]
    fn schwarz_pick_examples() {
        let id = SelfMap::new(FunctionSpec::expr("z")).unwrap();
        let p = schwarz_pick_check(&id, c(0.3, 0.5)).unwrap();
        assert!((p.lhs - p.rhs).abs() < 1e-14);
        let sq = SelfMap::new(FunctionSpec::expr("z^2")).unwrap();
        let p = schwarz_pick_check(&sq, c(0.5, 0.0)).unwrap();
        assert!((p.lhs - 1.0 / 0.9375).abs() < 1e-12 && (p.rhs - 4.0 / 3.0).abs() < 1e-12);
        let k = SelfMap::new(FunctionSpec::expr("0.3")).unwrap();
        let p = schwarz_pick_check(&k, c(0.9, 0.0)).unwrap();
        assert_eq!(p.lhs, 0.0);
        assert!((p.rhs - 1.0 / 0.19).abs() < 1e-12);
        assert!(matches!(SelfMap::new(FunctionSpec::expr("2*z")), Err(Error::NotSelfMap { .. })));
    }

    #[test]
    fn random_self_maps_satisfy_schwarz_pick() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for seed in 0..10 {
            let w = SelfMap::random(seed, 4);
            for _ in 0..50 {
                let z = Complex64::from_polar(0.999 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
                let p = schwarz_pick_check(&w, z).unwrap();
                assert!(p.lhs <= p.rhs + 1e-12);
            }
        }
    }

    #[test]
    fn harness_identity_is_equality() {
        let opts = NormOptions { n_radial: 60, n_angular: 120, r_max: 0.9999, refine_iters: 40 };
        let id = SelfMap::new(FunctionSpec::expr("z")).unwrap();
        let r = prop_schwarz_harness(&FunctionSpec::catalog("koebe"), &id, &opts).unwrap();
        assert_eq!(r.norm_t_omega, 0.0);
        assert!((r.lhs - r.rhs).abs() < 1e-9, "{r:?}");
        let w = SelfMap::new(FunctionSpec::expr("0.8*z^2")).unwrap();
        let r = prop_schwarz_harness(&FunctionSpec::catalog("koebe"), &w, &opts).unwrap();
        assert!(r.lhs <= r.rhs + 1e-6, "{r:?}");
    }

    #[test]
    fn primitive_of_composition_value() {
        // g = Koebe, ω = z: f = K
        let g = Function::Koebe;
        let w = Function::expr("z").unwrap();
        let f = PrimitiveOfComposition { g: &g, omega: &w };
        let z = c(0.4, 0.3);
        assert!((f.value(z).unwrap() - g.value(z).unwrap()).norm() < 1e-13);
    }
}
