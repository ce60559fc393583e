//! The twelve acceptance criteria, runnable from tests and from the command line.

use std::f64::consts::{FRAC_PI_4, PI, TAU};
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::Analytic;
use crate::constants::{argmax_h, g_series, h, solve_r0, ConstantsReport, DEFAULT_TOL};
use crate::error::Result;
use crate::funclang::{catalog_list, Function, FunctionSpec};
use crate::loewner::{
    becker_dilatation, betker_dilatation, criteria_report, ExtensionGrid, ExtensionOptions, SpirallikeExtension,
    Verdict,
};
use crate::norms::{norm, norm_scaling_check, FieldKind, NormOptions};
use crate::numerics::DEFAULT_ORDER;
use crate::subordination::{prop_schwarz_harness, subordination_check, DivZ, RMember, SelfMap};
use crate::transforms::{
    alexander_series, i_alpha_series, j_alpha_series, AlexanderOf, TransformOp, Transformed,
};

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "constants reproduction"),
    (2, "cross-characterization consistency"),
    (3, "Schwarzian norm formulas"),
    (4, "norm scaling identity"),
    (5, "sharp-bound property suite"),
    (6, "series negativity"),
    (7, "oracle equivalence"),
    (8, "jet correctness"),
    (9, "dilatation evaluators"),
    (10, "spirallike extension"),
    (11, "criteria report card coherence"),
    (12, "Schwarzian norm inequality for f' = g'(omega)"),
];

/// Normalized catalog entries (members of the class A).
pub const NORMALIZED_CATALOG: [&str; 6] =
    ["koebe", "phi", "psi", "krzyz-lewandowski", "half-plane-cayley", "spiral-koebe"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}: {} ({:.2} s)", self.id, self.title, self.detail, self.seconds)
    }
}

/// Accumulates sub-checks of one criterion.
struct Checks {
    passed: bool,
    lines: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Self { passed: true, lines: Vec::new() }
    }

    fn check(&mut self, ok: bool, line: String) {
        if !ok {
            self.passed = false;
            self.lines.push(format!("FAILED {line}"));
        } else {
            self.lines.push(line);
        }
    }

    fn error(&mut self, context: &str, e: impl fmt::Display) {
        self.passed = false;
        self.lines.push(format!("FAILED {context}: {e}"));
    }

    /// The failing lines, or a summary when everything passed.
    fn finish(self, summary: String) -> (bool, String) {
        if self.passed {
            (true, summary)
        } else {
            let mut failed: Vec<_> = self.lines.into_iter().filter(|l| l.starts_with("FAILED")).collect();
            if !summary.is_empty() {
                failed.push(summary);
            }
            (false, failed.join("; "))
        }
    }
}

pub fn run(id: u8, seed: u64) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(seed),
        5 => criterion_5(seed),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(seed),
        9 => criterion_9(seed),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(seed),
        _ => (false, format!("no criterion {id}")),
    };
    let title = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1).to_string();
    Outcome { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(seed: u64) -> Vec<Outcome> {
    CRITERIA.iter().map(|&(id, _)| run(id, seed)).collect()
}

pub const DEFAULT_SEED: u64 = 20140523;

fn criterion_1() -> (bool, String) {
    let start = Instant::now();
    let mut c = Checks::new();
    match ConstantsReport::compute(DEFAULT_TOL) {
        Ok(r) => {
            let d = &r.deviations;
            for (name, dev) in [
                ("r0", d.r0),
                ("h(r0)", d.h_r0),
                ("1/h(r0)", d.inv_h_r0),
                ("theta0", d.theta0),
                ("beta0", d.beta0),
                ("alpha0", d.alpha0),
            ] {
                c.check(dev <= 1e-5, format!("{name} deviation {dev:.2e}"));
            }
            let secs = start.elapsed().as_secs_f64();
            c.check(secs < 5.0, format!("runtime {secs:.2} s"));
            let k = &r.constants;
            c.finish(format!(
                "r0 = {:.6}, h(r0) = {:.6}, 1/h = {:.6}, theta0 = {:.6}, beta0 = {:.6}, alpha0 = {:.6}; max deviation {:.1e}",
                k.r0, k.h_r0, k.inv_h_r0, k.theta0, k.beta0, k.alpha0, r.max_deviation()
            ))
        }
        Err(e) => {
            c.error("constants", e);
            c.finish(String::new())
        }
    }
}

fn criterion_2() -> (bool, String) {
    let mut c = Checks::new();
    let r0 = solve_r0();
    let am = argmax_h();
    let report = ConstantsReport::compute(DEFAULT_TOL);
    match (r0, am, report) {
        (Ok(r0), Ok(am), Ok(rep)) => {
            let dr = (r0 - am).abs();
            let dt = (rep.constants.theta0 - rep.theta0_root).abs();
            c.check(dr <= 1e-8, format!("|r0 - argmax h| = {dr:.2e}"));
            c.check(dt <= 1e-4, format!("|theta0 - root| = {dt:.2e}"));
            c.finish(format!("|r0 - argmax h| = {dr:.1e}, |theta0(argmax) - theta0(root)| = {dt:.1e}"))
        }
        (r0, am, rep) => {
            for e in [r0.err(), am.err(), rep.err()].into_iter().flatten() {
                c.error("solve", e);
            }
            c.finish(String::new())
        }
    }
}

fn boundary_grid() -> NormOptions {
    NormOptions { n_radial: 100, n_angular: 360, ..NormOptions::default() }
}

fn criterion_3() -> (bool, String) {
    let mut c = Checks::new();
    let opts = boundary_grid();
    let mut measure = |label: String, f: Result<&dyn Analytic>, kind: FieldKind, want: f64| match f
        .and_then(|f| norm(f, kind, &opts))
    {
        Ok(r) => c.check((r.value - want).abs() <= 1e-3, format!("{label} = {:.6} (expected {want:.6})", r.value)),
        Err(e) => c.error(&label, e),
    };
    let phi = FunctionSpec::catalog("phi");
    for alpha in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.5, 0.0), Complex64::new(0.6, 0.8)] {
        let t = Transformed::from_spec(&phi, alpha, TransformOp::IAlpha);
        let a = alpha.norm();
        measure(
            format!("||S(I_alpha[phi])|| at alpha = {alpha}"),
            t.as_ref().map(|t| t as &dyn Analytic).map_err(Clone::clone),
            FieldKind::Schwarzian,
            2.0 * a * (a + 2.0),
        );
    }
    for eps in [0.1, 0.5, 1.0] {
        let hille = Function::catalog("hille", &[("epsilon".into(), Complex64::new(eps, 0.0))]);
        measure(
            format!("||S(hille)|| at epsilon = {eps}"),
            hille.as_ref().map(|f| f as &dyn Analytic).map_err(Clone::clone),
            FieldKind::Schwarzian,
            2.0 * (1.0 + eps * eps),
        );
    }
    measure("||S(koebe)||".into(), Ok(&Function::Koebe), FieldKind::Schwarzian, 6.0);
    measure("||T(phi)||".into(), Ok(&Function::Phi), FieldKind::PreSchwarzian, 2.0);
    let n = c.lines.len();
    c.finish(format!("{n} norms within 1e-3 of their closed forms"))
}

const SCALING_ALPHAS: [(f64, f64); 5] = [(0.3, 0.0), (0.5, 0.5), (-0.7, 0.0), (0.0, 1.2), (1.5, -0.4)];

fn random_r(seed: u64, k: u64) -> RMember {
    RMember::random(seed.wrapping_mul(1000).wrapping_add(k), 1 + (k % 5) as usize)
}

fn criterion_4(seed: u64) -> (bool, String) {
    let mut c = Checks::new();
    let mut worst = 0.0f64;
    for k in 0..10 {
        let f = random_r(seed, k);
        let spec = match f.series(DEFAULT_ORDER) {
            Ok(s) => FunctionSpec::series(s.coeffs().to_vec()),
            Err(e) => {
                c.error("series", e);
                continue;
            }
        };
        for &(re, im) in &SCALING_ALPHAS {
            let alpha = Complex64::new(re, im);
            match norm_scaling_check(&spec, alpha) {
                Ok((lhs, rhs)) => {
                    let dev = (lhs / rhs - 1.0).abs();
                    worst = worst.max(dev);
                    c.check(dev <= 1e-6, format!("f #{k}, alpha = {alpha}: ratio - 1 = {dev:.2e}"));
                }
                Err(e) => c.error(&format!("f #{k}, alpha = {alpha}"), e),
            }
        }
    }
    c.finish(format!("50 ratios, max |ratio - 1| = {worst:.1e}"))
}

fn criterion_5(seed: u64) -> (bool, String) {
    let mut c = Checks::new();
    let bound = match solve_r0().and_then(h) {
        Ok(b) => b,
        Err(e) => {
            c.error("h(r0)", e);
            return c.finish(String::new());
        }
    };
    let opts = boundary_grid();
    let mut worst = 0.0f64;
    for k in 0..30 {
        let f = random_r(seed ^ 0x5a5a, k);
        match norm(&AlexanderOf(&f), FieldKind::PreSchwarzian, &opts) {
            Ok(r) => {
                worst = worst.max(r.value);
                c.check(r.value <= bound + 1e-3, format!("f #{k}: ||T(J[f])|| = {:.6}", r.value));
            }
            Err(e) => c.error(&format!("f #{k} norm"), e),
        }
        match subordination_check(&DivZ(&f), &Function::QDominant, 4096) {
            Ok(s) => c.check(s.subordinate, format!("f #{k}: f(z)/z subordinate to q (excess {:.2e})", s.worst_excess)),
            Err(e) => c.error(&format!("f #{k} subordination"), e),
        }
    }
    match Transformed::from_spec(&FunctionSpec::catalog("phi"), Complex64::new(1.0, 0.0), TransformOp::Alexander)
        .and_then(|t| norm(&t, FieldKind::PreSchwarzian, &opts))
    {
        Ok(r) => c.check(
            (r.value - bound).abs() <= 1e-3,
            format!("||T(J[phi])|| = {:.6} vs h(r0) = {bound:.6}", r.value),
        ),
        Err(e) => c.error("J[phi]", e),
    }
    c.finish(format!("30 members: max ||T(J[f])|| = {worst:.6} <= h(r0) = {bound:.6}; phi attains the bound"))
}

fn criterion_6() -> (bool, String) {
    let mut c = Checks::new();
    match g_series(256) {
        Ok(g) => {
            let g1 = g.coeff(1);
            let g2 = g.coeff(2);
            c.check((g1 + 1.0).norm() <= 1e-12, format!("g1 = {g1}"));
            c.check((g2 + 1.0 / 3.0).norm() <= 1e-12, format!("g2 = {g2}"));
            let largest = g.coeffs().iter().map(|x| x.re).fold(f64::NEG_INFINITY, f64::max);
            let worst_im = g.coeffs().iter().map(|x| x.im.abs()).fold(0.0, f64::max);
            let positive: Vec<usize> = (0..=256).filter(|&n| g.coeff(n).re > 0.0).collect();
            c.check(positive.is_empty() && worst_im == 0.0, format!("positive coefficients at {positive:?}"));
            c.finish(format!("g1 = {:.15}, g2 = {:.15}, largest coefficient {largest:.3e}", g1.re, g2.re))
        }
        Err(e) => {
            c.error("g series", e);
            c.finish(String::new())
        }
    }
}

const ORACLE_ALPHAS: [(f64, f64); 5] = [(0.25, 0.0), (0.5, 0.0), (1.0, 0.0), (-0.5, 0.0), (0.3, 0.4)];

fn oracle_points() -> Vec<Complex64> {
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for r in [0.1, 0.3, 0.5] {
        for k in 0..6 {
            pts.push(Complex64::from_polar(r, TAU * (k as f64 + 0.25) / 6.0));
        }
    }
    pts
}

fn criterion_7() -> (bool, String) {
    let mut c = Checks::new();
    let pts = oracle_points();
    let (mut worst_point, mut worst_coeff) = (0.0f64, 0.0f64);
    for name in NORMALIZED_CATALOG {
        let spec = FunctionSpec::catalog(name);
        let series = match spec.compile().and_then(|f| f.series(DEFAULT_ORDER)) {
            Ok(s) => s,
            Err(e) => {
                c.error(name, e);
                continue;
            }
        };
        for &(re, im) in &ORACLE_ALPHAS {
            let alpha = Complex64::new(re, im);
            for op in [TransformOp::JAlpha, TransformOp::IAlpha] {
                let oracle = match op {
                    TransformOp::JAlpha => j_alpha_series(&series, alpha, DEFAULT_ORDER),
                    _ => i_alpha_series(&series, alpha, DEFAULT_ORDER),
                };
                let pointwise = Transformed::from_spec(&spec, alpha, op);
                match (oracle, pointwise) {
                    (Ok(s), Ok(t)) => {
                        let mut dev = 0.0f64;
                        for &z in &pts {
                            match t.value(z) {
                                Ok(v) => dev = dev.max((v - s.eval(z)).norm()),
                                Err(e) => c.error(&format!("{name} {op:?} at {z}"), e),
                            }
                        }
                        worst_point = worst_point.max(dev);
                        c.check(dev <= 1e-8, format!("{name} {op:?} alpha = {alpha}: {dev:.2e}"));
                    }
                    (a, b) => {
                        for e in [a.err(), b.err()].into_iter().flatten() {
                            c.error(&format!("{name} {op:?}"), e);
                        }
                    }
                }
            }
            let composed = alexander_series(&series, DEFAULT_ORDER).and_then(|j| i_alpha_series(&j, alpha, DEFAULT_ORDER));
            match (j_alpha_series(&series, alpha, DEFAULT_ORDER), composed) {
                (Ok(a), Ok(b)) => {
                    let dev = a
                        .coeffs()
                        .iter()
                        .zip(b.coeffs())
                        .map(|(x, y)| (x - y).norm() / y.norm().max(1.0))
                        .fold(0.0, f64::max);
                    worst_coeff = worst_coeff.max(dev);
                    c.check(dev <= 1e-10, format!("{name} J = I o J at alpha = {alpha}: {dev:.2e}"));
                }
                (a, b) => {
                    for e in [a.err(), b.err()].into_iter().flatten() {
                        c.error(&format!("{name} composition"), e);
                    }
                }
            }
        }
    }
    c.finish(format!(
        "6 functions x 5 alphas: pointwise vs series {worst_point:.1e}, J_alpha vs I_alpha o J {worst_coeff:.1e}"
    ))
}

/// Fourth-order central difference of `g` at `z` with step `h`.
fn central_difference(g: impl Fn(Complex64) -> Result<Complex64>, z: Complex64, h: f64) -> Result<Complex64> {
    let hh = Complex64::new(h, 0.0);
    let d1 = g(z + hh)? - g(z - hh)?;
    let d2 = g(z + 2.0 * hh)? - g(z - 2.0 * hh)?;
    Ok((8.0 * d1 - d2) / (12.0 * h))
}

fn criterion_8(seed: u64) -> (bool, String) {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x8888);
    let points: Vec<Complex64> =
        (0..50).map(|_| Complex64::from_polar(0.9 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))).collect();
    let mut worst = 0.0f64;
    let names: Vec<&str> = catalog_list().iter().map(|e| e.name).collect();
    for name in names {
        let f = match FunctionSpec::catalog(name).compile() {
            Ok(f) => f,
            Err(e) => {
                c.error(name, e);
                continue;
            }
        };
        let mut dev = 0.0f64;
        for &z in &points {
            let h = 1e-3 * (1.0 - z.norm());
            let jet = match f.jet(z) {
                Ok(j) => j.as_array(),
                Err(e) => {
                    c.error(&format!("{name} at {z}"), e);
                    continue;
                }
            };
            for k in 0..3 {
                match central_difference(|u| Ok(f.jet(u)?.as_array()[k]), z, h) {
                    Ok(fd) => dev = dev.max((fd - jet[k + 1]).norm() / jet[k + 1].norm().max(1.0)),
                    Err(e) => c.error(&format!("{name} difference at {z}"), e),
                }
            }
        }
        worst = worst.max(dev);
        c.check(dev <= 1e-6, format!("{name}: {dev:.2e}"));
    }
    c.finish(format!("8 functions x 50 points x 3 channels, max relative deviation {worst:.1e}"))
}

fn criterion_9(seed: u64) -> (bool, String) {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9999);
    let one = Complex64::new(1.0, 0.0);
    let (mut mismatches, mut worst) = (0usize, 0.0f64);
    for _ in 0..10_000 {
        let p = Complex64::from_polar(10f64.powf(rng.gen_range(-3.0..3.0)), rng.gen_range(-PI..PI));
        match (betker_dilatation(p, one), becker_dilatation(p), betker_dilatation(p, p)) {
            (Ok(a), Ok(b), Ok(d)) => {
                if a.to_bits() != b.to_bits() {
                    mismatches += 1;
                }
                worst = worst.max((d - p.arg().sin().abs()).abs());
            }
            (a, b, d) => {
                for e in [a.err(), b.err(), d.err()].into_iter().flatten() {
                    c.error(&format!("p = {p}"), e);
                }
            }
        }
    }
    c.check(mismatches == 0, format!("{mismatches} of 10000 Betker(p, 1) != Becker(p)"));
    c.check(worst <= 1e-12, format!("max |Betker(p, p) - |sin arg p|| = {worst:.2e}"));
    c.finish(format!("10000 samples: Betker(p, 1) == Becker(p) exactly; |Betker(p, p) - |sin arg p|| <= {worst:.1e}"))
}

fn criterion_10() -> (bool, String) {
    let mut c = Checks::new();
    let opts = ExtensionOptions::default();
    let mut summary = Vec::new();
    let cases: [(&str, FunctionSpec, f64, bool); 3] = [
        ("spiral-koebe", FunctionSpec::catalog("spiral-koebe"), FRAC_PI_4, false),
        ("krzyz-lewandowski", FunctionSpec::catalog("krzyz-lewandowski"), -FRAC_PI_4, false),
        ("z/(1-0.5z)", FunctionSpec::expr("z/(1-0.5*z)"), 0.0, true),
    ];
    for (name, spec, lambda, strict) in cases {
        let grid = SpirallikeExtension::from_spec(&spec, lambda).and_then(|e| ExtensionGrid::compute(&e, &opts));
        match grid {
            Ok(g) => {
                let s = &g.summary;
                let rate = g.success_rate();
                if strict {
                    c.check(
                        s.max_mu <= s.k_bound + 0.05,
                        format!("{name}: max |mu| = {:.4} vs sin(pi alpha/2) = {:.4}", s.max_mu, s.k_bound),
                    );
                    c.check(s.failures == 0, format!("{name}: {} failed cells", s.failures));
                } else {
                    c.check(rate >= 0.99, format!("{name}: Newton convergence rate {:.2}%", 100.0 * rate));
                    c.check(s.boundary_gap <= 1e-3, format!("{name}: boundary gap {:.2e}", s.boundary_gap));
                    c.check(s.max_mu <= 1.0, format!("{name}: max |mu| = {:.4}", s.max_mu));
                }
                summary.push(format!(
                    "{name}: rate {:.1}%, max |mu| {:.3}, k {:.3}, gap {:.1e}",
                    100.0 * rate,
                    s.max_mu,
                    s.k_bound,
                    s.boundary_gap
                ));
            }
            Err(e) => c.error(name, e),
        }
    }
    c.finish(summary.join("; "))
}

fn criterion_11() -> (bool, String) {
    let mut c = Checks::new();
    let opts = boundary_grid();
    let phi = criteria_report(&Function::Phi, Complex64::new(0.5, 0.0), &opts);
    c.check(phi.verdict("noshiro_warschawski") == Some(Verdict::Pass), "phi passes Noshiro-Warschawski".into());
    let phi_t = phi.item("becker_univalence").and_then(|i| i.measured);
    c.check(
        phi.verdict("becker_univalence") == Some(Verdict::Fail) && phi_t.is_some_and(|t| (t - 2.0).abs() <= 1e-3),
        format!("phi fails Becker with ||T|| = {phi_t:?}"),
    );
    let koebe = criteria_report(&Function::Koebe, Complex64::new(1.0, 0.0), &opts);
    c.check(koebe.verdict("noshiro_warschawski") == Some(Verdict::Fail), "Koebe fails Noshiro-Warschawski".into());
    c.check(koebe.verdict("nehari") == Some(Verdict::Fail), "Koebe fails Nehari".into());
    match Function::expr("z") {
        Ok(id) => {
            let r = criteria_report(&id, Complex64::new(0.2, 0.0), &opts);
            let bad: Vec<_> = r.items.iter().filter(|i| i.verdict != Verdict::Pass).map(|i| i.id.clone()).collect();
            c.check(bad.is_empty(), format!("identity fails {bad:?}"));
        }
        Err(e) => c.error("identity", e),
    }
    c.finish("phi: NW pass, Becker fail (||T|| = 2); Koebe: NW fail; identity passes every item".into())
}

const PROP_G: [&str; 5] = ["koebe", "phi", "psi", "half-plane-cayley", "krzyz-lewandowski"];

fn criterion_12(seed: u64) -> (bool, String) {
    let mut c = Checks::new();
    let opts = NormOptions { n_radial: 60, n_angular: 180, ..NormOptions::default() };
    let mut worst = f64::NEG_INFINITY;
    for k in 0..20u64 {
        let g = FunctionSpec::catalog(PROP_G[k as usize % PROP_G.len()]);
        let omega = SelfMap::random(seed.wrapping_add(k), 1 + (k % 4) as usize);
        match prop_schwarz_harness(&g, &omega, &opts) {
            Ok(r) => {
                worst = worst.max(r.lhs - r.rhs);
                c.check(r.lhs <= r.rhs + 1e-6, format!("pair #{k} ({g}): {:.6} <= {:.6}", r.lhs, r.rhs));
            }
            Err(e) => c.error(&format!("pair #{k}"), e),
        }
    }
    for (g, w) in [("koebe", "z"), ("phi", "z"), ("koebe", "exp(i*pi/3)*z")] {
        match SelfMap::new(FunctionSpec::expr(w)).and_then(|om| prop_schwarz_harness(&FunctionSpec::catalog(g), &om, &opts)) {
            Ok(r) => c.check(
                (r.lhs - r.rhs).abs() <= 1e-6,
                format!("affine omega = {w}, g = {g}: {:.9} vs {:.9}", r.lhs, r.rhs),
            ),
            Err(e) => c.error(&format!("affine omega = {w}"), e),
        }
    }
    c.finish(format!("20 random pairs, max lhs - rhs = {worst:.3e}; equality for rotations"))
}
