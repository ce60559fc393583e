//! Gauss–Legendre panel quadrature along the segment `[0, z]`, with the
//! logarithm of the integrand continued along the path.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::nearest_branch;
use crate::error::{Error, Result};

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// `∫_a^b f`, one panel.
    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut acc = Complex64::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * f(mid + half * x);
        }
        acc * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

pub const PANEL_NODES: usize = 32;
pub const INITIAL_PANELS: usize = 8;
pub const MAX_DEPTH: u32 = 12;

fn rule32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PANEL_NODES))
}

/// Result of a branch-tracked integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackedIntegral {
    /// `z ∫₀¹ exp(α L(sz)) ds`.
    pub value: Complex64,
    /// The continued logarithm `L(z)`.
    pub end_log: Complex64,
    pub panels: usize,
}

/// Integrates `exp(α·L(u))` over `u ∈ [0, z]`, where `L` is the logarithm
/// of `base(u)` continued from `L(0) = 0`.
///
/// `base` returns the integrand base at interior points of the segment
/// (never at `u = 0`). Each panel checks that consecutive samples of the
/// continued logarithm differ by at most π; failing panels are bisected up
/// to [`MAX_DEPTH`] times.
pub fn tracked_segment_integral<B>(base: B, alpha: Complex64, z: Complex64) -> Result<TrackedIntegral>
where
    B: Fn(Complex64) -> Result<Complex64>,
{
    let mut state = Walk { base: &base, alpha, z, log: Complex64::default(), sum: Complex64::default(), panels: 0, integrate: true };
    let h = 1.0 / INITIAL_PANELS as f64;
    for k in 0..INITIAL_PANELS {
        state.panel(k as f64 * h, (k + 1) as f64 * h, 0)?;
    }
    Ok(TrackedIntegral { value: state.sum * z, end_log: state.log, panels: state.panels })
}

/// The continued logarithm `L(z)` alone, on the same panel schedule as
/// [`tracked_segment_integral`].
pub fn tracked_log<B>(base: B, z: Complex64) -> Result<Complex64>
where
    B: Fn(Complex64) -> Result<Complex64>,
{
    let mut state = Walk {
        base: &base,
        alpha: Complex64::default(),
        z,
        log: Complex64::default(),
        sum: Complex64::default(),
        panels: 0,
        integrate: false,
    };
    let h = 1.0 / INITIAL_PANELS as f64;
    for k in 0..INITIAL_PANELS {
        state.panel(k as f64 * h, (k + 1) as f64 * h, 0)?;
    }
    Ok(state.log)
}

struct Walk<'a, B> {
    base: &'a B,
    alpha: Complex64,
    z: Complex64,
    log: Complex64,
    sum: Complex64,
    panels: usize,
    integrate: bool,
}

impl<B: Fn(Complex64) -> Result<Complex64>> Walk<'_, B> {
    fn continued_log(&self, s: f64, reference: Complex64) -> Result<Complex64> {
        let w = (self.base)(self.z * s)?;
        if !(w.norm() > 1e-300) || !w.is_finite() {
            return Err(Error::ZeroValue(w));
        }
        let l = w.ln();
        let m = nearest_branch(w, reference.im);
        Ok(l + Complex64::new(0.0, 2.0 * PI * m as f64))
    }

    fn panel(&mut self, a: f64, b: f64, depth: u32) -> Result<()> {
        let rule = rule32();
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut logs = Vec::with_capacity(rule.nodes.len() + 1);
        let mut prev = self.log;
        let mut ok = true;
        for s in rule.nodes.iter().map(|x| mid + half * x).chain(std::iter::once(b)) {
            let l = self.continued_log(s, prev)?;
            if (l - prev).norm() > PI {
                ok = false;
                break;
            }
            logs.push(l);
            prev = l;
        }
        if !ok {
            if depth >= MAX_DEPTH {
                return Err(Error::BranchTrackingFailure(self.z));
            }
            self.panel(a, mid, depth + 1)?;
            return self.panel(mid, b, depth + 1);
        }
        if self.integrate {
            let mut acc = Complex64::default();
            for (l, w) in logs.iter().zip(&rule.weights) {
                acc += *w * (self.alpha * l).exp();
            }
            self.sum += acc * half;
        }
        self.log = prev;
        self.panels += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_high_degree_polynomials() {
        let g = GaussLegendre::new(32);
        let wsum: f64 = g.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
        // ∫_0^1 x^63 = 1/64
        let v = g.integrate(0.0, 1.0, |x| Complex64::new(x.powi(63), 0.0));
        assert!((v.re - 1.0 / 64.0).abs() < 1e-15);
        let e = g.integrate(-1.0, 2.0, |x| Complex64::new(x.exp(), 0.0));
        assert!((e.re - (2f64.exp() - (-1f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn small_rules_match_tables() {
        let g = GaussLegendre::new(3);
        assert!((g.nodes[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((g.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn koebe_quotient_integral() {
        // ∫_0^z (1-u)^{-2} du = z/(1-z)
        let z = Complex64::new(0.5, 0.0);
        let r = tracked_segment_integral(|u| Ok((1.0 - u).powi(-2)), Complex64::new(1.0, 0.0), z).unwrap();
        assert!((r.value - 1.0).norm() < 1e-14);
        assert!((r.end_log - Complex64::new(2.0 * 2f64.ln(), 0.0)).norm() < 1e-14);
    }

    #[test]
    fn logarithm_is_continued_past_the_principal_cut() {
        // base = exp(4i u) winds past arg = π for u ∈ [0, 1.2]
        let z = Complex64::new(1.2, 0.0);
        let l = tracked_log(|u| Ok((Complex64::new(0.0, 4.0) * u).exp()), z).unwrap();
        assert!((l - Complex64::new(0.0, 4.8)).norm() < 1e-13);
    }

    #[test]
    fn zero_of_the_base_is_reported() {
        let z = Complex64::new(0.5, 0.0);
        let r = tracked_segment_integral(|u| Ok(u - 0.25), Complex64::new(0.5, 0.0), z);
        assert!(r.is_err());
    }
}
