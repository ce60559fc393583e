//! Named functions from the theory of the integral transforms, plus the
//! compiled [`Function`] type every [`super::FunctionSpec`] turns into.
//!
//! `koebe`, `phi`, `psi` and `q-dominant` carry hand-written derivative
//! formulas; the remaining entries are expressions in the formula language,
//! so each family has an independent second evaluator for testing.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use super::ast::{complex_literal, Ast};
use super::parse;
use crate::analytic::Analytic;
use crate::error::{Error, Result};
use crate::numerics::{Jet3, PowerSeries};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub formula: &'static str,
    pub tags: &'static [&'static str],
    /// Parameter names with their default values.
    pub params: &'static [(&'static str, f64)],
}

const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "koebe",
        formula: "z/(1-z)^2",
        tags: &["class A", "class S", "starlike", "extremal for S"],
        params: &[],
    },
    CatalogEntry {
        name: "phi",
        formula: "-z-2*log(1-z)",
        tags: &["class A", "class ℝ", "class S", "extremal for ℝ"],
        params: &[],
    },
    CatalogEntry {
        name: "psi",
        formula: "-z+2*log(1+z)",
        tags: &["class A", "class ℝ", "class S"],
        params: &[],
    },
    CatalogEntry {
        name: "hille",
        formula: "((1+z)/(1-z))^(i*epsilon)",
        tags: &["locally univalent", "not univalent for epsilon > 0"],
        params: &[("epsilon", 1.0)],
    },
    CatalogEntry {
        name: "krzyz-lewandowski",
        formula: "z/(1-i*z)^(1-i)",
        // Re(e^{iπ/4} z f'/f) > 0, i.e. spirallike with angle −π/4 under
        // the convention Re(e^{−iλ} z f'/f) > 0 used throughout this crate.
        tags: &["class A", "class S", "spirallike", "spiral angle -π/4"],
        params: &[],
    },
    CatalogEntry {
        name: "q-dominant",
        formula: "(-z-2*log(1-z))/z",
        tags: &["convex", "q(0) = 1", "best dominant of f(z)/z over ℝ"],
        params: &[],
    },
    CatalogEntry {
        name: "half-plane-cayley",
        formula: "z/(1-z)",
        tags: &["class A", "class S", "convex", "Möbius"],
        params: &[],
    },
    CatalogEntry {
        name: "spiral-koebe",
        formula: "z/(1-z)^(2*exp(i*lambda)*cos(lambda))",
        tags: &["class A", "class S", "spirallike", "spiral angle lambda"],
        params: &[("lambda", FRAC_PI_4)],
    },
];

pub fn catalog_list() -> &'static [CatalogEntry] {
    CATALOG
}

pub fn catalog_entry(name: &str) -> Result<&'static CatalogEntry> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalog(name.to_string()))
}

/// A function ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum Function {
    Koebe,
    Phi,
    Psi,
    QDominant,
    Expr(Ast),
    Series(PowerSeries),
}

fn param(params: &[(String, Complex64)], name: &str, default: f64) -> Complex64 {
    params
        .iter()
        .find(|(k, _)| k == name)
        .map(|(_, v)| *v)
        .unwrap_or(Complex64::new(default, 0.0))
}

impl Function {
    /// Instantiates a catalog entry with the given parameters.
    pub fn catalog(name: &str, params: &[(String, Complex64)]) -> Result<Self> {
        let entry = catalog_entry(name)?;
        for (k, _) in params {
            if !entry.params.iter().any(|(p, _)| p == k) {
                return Err(Error::BadParameter(format!("`{name}` has no parameter `{k}`")));
            }
        }
        let get = |p: &str| {
            let default = entry.params.iter().find(|(n, _)| *n == p).map_or(0.0, |(_, d)| *d);
            param(params, p, default)
        };
        let i = Complex64::new(0.0, 1.0);
        Ok(match name {
            "koebe" => Function::Koebe,
            "phi" => Function::Phi,
            "psi" => Function::Psi,
            "q-dominant" => Function::QDominant,
            "hille" => {
                let e = get("epsilon");
                Function::Expr(parse(&format!("((1+z)/(1-z))^{}", complex_literal(i * e)))?)
            }
            "spiral-koebe" => {
                let l = get("lambda");
                let exponent = 2.0 * (i * l).exp() * l.cos();
                Function::Expr(parse(&format!("z/(1-z)^{}", complex_literal(exponent)))?)
            }
            _ => Function::Expr(parse(entry.formula)?),
        })
    }

    pub fn expr(formula: &str) -> Result<Self> {
        Ok(Function::Expr(parse(formula)?))
    }

    /// Taylor series at the origin, truncated at `order`.
    pub fn series(&self, order: usize) -> Result<PowerSeries> {
        let c = |x: f64| Complex64::new(x, 0.0);
        Ok(match self {
            Function::Koebe => PowerSeries::from_fn(order, |n| c(n as f64)),
            Function::Phi => PowerSeries::from_fn(order, |n| match n {
                0 => c(0.0),
                1 => c(1.0),
                _ => c(2.0 / n as f64),
            }),
            Function::Psi => PowerSeries::from_fn(order, |n| match n {
                0 => c(0.0),
                1 => c(1.0),
                _ => c(if n % 2 == 0 { -2.0 } else { 2.0 } / n as f64),
            }),
            Function::QDominant => PowerSeries::from_fn(order, |n| {
                if n == 0 {
                    c(1.0)
                } else {
                    c(2.0 / (n + 1) as f64)
                }
            }),
            Function::Expr(ast) => ast.eval_series(order)?,
            Function::Series(s) => {
                if s.order() >= order {
                    s.truncate(order)?
                } else {
                    s.pad_polynomial(order)
                }
            }
        })
    }
}

fn singular_at(z: Complex64, at: Complex64) -> Result<()> {
    if (z - at).norm() < 1e-15 {
        return Err(Error::domain(z, format!("singularity at {at}")));
    }
    Ok(())
}

/// Radius inside which `q-dominant` is summed from its Taylor series rather
/// than from the quotient `φ(z)/z`, which cancels near the origin.
const Q_SERIES_RADIUS: f64 = 0.05;

impl Analytic for Function {
    fn jet(&self, z: Complex64) -> Result<Jet3> {
        let one = Complex64::new(1.0, 0.0);
        match self {
            Function::Koebe => {
                singular_at(z, one)?;
                let u = (one - z).inv();
                let u2 = u * u;
                Ok(Jet3::new(
                    z * u2,
                    (1.0 + z) * u2 * u,
                    (4.0 + 2.0 * z) * u2 * u2,
                    (18.0 + 6.0 * z) * u2 * u2 * u,
                ))
            }
            Function::Phi => {
                singular_at(z, one)?;
                let u = (one - z).inv();
                Ok(Jet3::new(-z - 2.0 * (one - z).ln(), (1.0 + z) * u, 2.0 * u * u, 4.0 * u * u * u))
            }
            Function::Psi => {
                singular_at(z, -one)?;
                let u = (one + z).inv();
                Ok(Jet3::new(-z + 2.0 * (one + z).ln(), (1.0 - z) * u, -2.0 * u * u, 4.0 * u * u * u))
            }
            Function::QDominant => {
                singular_at(z, one)?;
                if z.norm() < Q_SERIES_RADIUS {
                    return Ok(self.series(40)?.eval_jet(z));
                }
                let phi = Function::Phi.jet(z)?;
                phi.checked_div(&Jet3::identity(z))
            }
            Function::Expr(ast) => ast.eval_jet(z),
            Function::Series(s) => Ok(s.eval_jet(z)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hand_coded_jets_at_origin() {
        let z0 = Complex64::default();
        let k = Function::Koebe.jet(z0).unwrap();
        assert_eq!(k.as_array(), [c(0.0, 0.0), c(1.0, 0.0), c(4.0, 0.0), c(18.0, 0.0)]);
        let p = Function::Phi.jet(z0).unwrap();
        assert_eq!(p.as_array(), [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        let h = Function::catalog("hille", &[("epsilon".into(), c(1.0, 0.0))]).unwrap();
        assert!((h.jet(z0).unwrap().f1 - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn hand_coded_jets_match_formulas() {
        for name in ["koebe", "phi", "psi", "q-dominant"] {
            let hand = Function::catalog(name, &[]).unwrap();
            let expr = Function::expr(catalog_entry(name).unwrap().formula).unwrap();
            for z in [c(0.3, 0.2), c(-0.6, 0.1), c(0.02, -0.01), c(0.1, 0.85)] {
                let (a, b) = (hand.jet(z).unwrap(), expr.jet(z).unwrap());
                // the quotient formula of q-dominant cancels near the origin
                let tol = if z.norm() < 0.1 { 1e-8 } else { 1e-11 };
                for (x, y) in a.as_array().iter().zip(b.as_array()) {
                    assert!((x - y).norm() <= tol * (1.0 + y.norm()), "{name} at {z}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn spiral_koebe_at_zero_angle_is_koebe() {
        let s = Function::catalog("spiral-koebe", &[("lambda".into(), c(0.0, 0.0))]).unwrap();
        for z in [c(0.3, 0.2), c(-0.9, 0.0), c(0.5, -0.7)] {
            assert!((s.value(z).unwrap() - Function::Koebe.value(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn catalog_tags() {
        assert!(catalog_entry("phi").unwrap().tags.contains(&"class ℝ"));
        let k = catalog_entry("koebe").unwrap().tags;
        assert!(k.contains(&"class S") && k.contains(&"starlike"));
        assert!(matches!(Function::catalog("royster", &[]), Err(Error::UnknownCatalog(_))));
        assert!(matches!(
            Function::catalog("koebe", &[("lambda".into(), c(1.0, 0.0))]),
            Err(Error::BadParameter(_))
        ));
    }

    #[test]
    fn closed_form_series_agree_with_expression_series() {
        for name in ["koebe", "phi", "psi", "q-dominant"] {
            let hand = Function::catalog(name, &[]).unwrap().series(64).unwrap();
            let expr = Function::expr(catalog_entry(name).unwrap().formula).unwrap().series(64).unwrap();
            assert!(hand.max_abs_diff(&expr) < 1e-12, "{name}");
        }
    }

    #[test]
    fn singularities_are_domain_errors() {
        let one = c(1.0, 0.0);
        assert!(matches!(Function::Koebe.jet(one), Err(Error::Domain { .. })));
        assert!(matches!(Function::Phi.jet(one), Err(Error::Domain { .. })));
        assert!(matches!(Function::Psi.jet(-one), Err(Error::Domain { .. })));
    }
}
