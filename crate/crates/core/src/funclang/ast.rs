use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{Jet3, PowerSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Only produced transiently by the parser; powers are stored as [`Ast::Pow`].
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
}

/// Expression tree in the single variable `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Var,
    Const(Complex64),
    Neg(Box<Ast>),
    Binary(BinOp, Box<Ast>, Box<Ast>),
    /// Power with a constant exponent (principal branch unless integral).
    Pow(Box<Ast>, Complex64),
    Call(Func, Box<Ast>),
}

/// Exponents that are small integers are evaluated by repeated
/// multiplication, so `z^2` is fine at `z = 0`.
fn integer_exponent(e: Complex64) -> Option<i32> {
    (e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= 1024.0).then_some(e.re as i32)
}

fn check_divisor(d: Complex64, z: Complex64) -> Result<()> {
    if d.norm() < 1e-300 {
        return Err(Error::domain(z, "division by zero"));
    }
    Ok(())
}

fn series_int_pow(base: &PowerSeries, n: u32) -> PowerSeries {
    let mut acc = PowerSeries::one(base.order());
    let mut b = base.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b);
        }
        b = b.mul(&b);
        e >>= 1;
    }
    acc
}

const SERIES_ZERO_TOL: f64 = 1e-13;
const SERIES_ORDER_SLACK: usize = 8;

impl Ast {
    pub fn contains_variable(&self) -> bool {
        match self {
            Ast::Var => true,
            Ast::Const(_) => false,
            Ast::Neg(a) | Ast::Pow(a, _) | Ast::Call(_, a) => a.contains_variable(),
            Ast::Binary(_, a, b) => a.contains_variable() || b.contains_variable(),
        }
    }

    /// Direct complex evaluation, principal branches throughout.
    pub fn eval_value(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self {
            Ast::Var => z,
            Ast::Const(c) => *c,
            Ast::Neg(a) => -a.eval_value(z)?,
            Ast::Binary(op, a, b) => {
                let (x, y) = (a.eval_value(z)?, b.eval_value(z)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        check_divisor(y, z)?;
                        x / y
                    }
                    BinOp::Pow => unreachable!("powers are stored as Ast::Pow"),
                }
            }
            Ast::Pow(a, e) => {
                let x = a.eval_value(z)?;
                match integer_exponent(*e) {
                    Some(n) => {
                        if n < 0 {
                            check_divisor(x, z)?;
                        }
                        x.powi(n)
                    }
                    None => {
                        if x.norm() < 1e-300 {
                            return Err(Error::ZeroValue(x));
                        }
                        (e * x.ln()).exp()
                    }
                }
            }
            Ast::Call(f, a) => {
                let x = a.eval_value(z)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Log | Func::Sqrt => {
                        if x.norm() < 1e-300 {
                            return Err(Error::ZeroValue(x));
                        }
                        if *f == Func::Log {
                            x.ln()
                        } else {
                            (0.5 * x.ln()).exp()
                        }
                    }
                }
            }
        })
    }

    /// Value and first three derivatives at `z`.
    pub fn eval_jet(&self, z: Complex64) -> Result<Jet3> {
        match self {
            Ast::Var => Ok(Jet3::identity(z)),
            Ast::Const(c) => Ok(Jet3::constant(*c)),
            Ast::Neg(a) => Ok(-a.eval_jet(z)?),
            Ast::Binary(op, a, b) => {
                let (x, y) = (a.eval_jet(z)?, b.eval_jet(z)?);
                match op {
                    BinOp::Add => Ok(x + y),
                    BinOp::Sub => Ok(x - y),
                    BinOp::Mul => Ok(x * y),
                    BinOp::Div => {
                        check_divisor(y.f0, z)?;
                        x.checked_div(&y)
                    }
                    BinOp::Pow => unreachable!("powers are stored as Ast::Pow"),
                }
            }
            Ast::Pow(a, e) => {
                let x = a.eval_jet(z)?;
                match integer_exponent(*e) {
                    Some(n) => {
                        if n < 0 {
                            check_divisor(x.f0, z)?;
                        }
                        x.powi(n)
                    }
                    None => x.powc(*e, 0),
                }
            }
            Ast::Call(f, a) => {
                let x = a.eval_jet(z)?;
                match f {
                    Func::Log => x.log(),
                    Func::Exp => Ok(x.exp()),
                    Func::Sqrt => x.sqrt(),
                }
            }
        }
    }

    /// Taylor series at the origin truncated at `order`.
    ///
    /// Quotients whose numerator and denominator both vanish at the origin
    /// are cancelled, which costs truncation order; the evaluation runs at a
    /// slightly higher order and is cut back at the end.
    pub fn eval_series(&self, order: usize) -> Result<PowerSeries> {
        let s = self.series_rec(order + SERIES_ORDER_SLACK)?;
        s.truncate(order)
    }

    fn series_rec(&self, order: usize) -> Result<PowerSeries> {
        Ok(match self {
            Ast::Var => PowerSeries::identity(order),
            Ast::Const(c) => PowerSeries::constant(*c, order),
            Ast::Neg(a) => -&a.series_rec(order)?,
            Ast::Binary(op, a, b) => {
                let (x, y) = (a.series_rec(order)?, b.series_rec(order)?);
                match op {
                    BinOp::Add => &x + &y,
                    BinOp::Sub => &x - &y,
                    BinOp::Mul => x.mul(&y),
                    BinOp::Div => x.div_cancelling(&y, SERIES_ZERO_TOL)?,
                    BinOp::Pow => unreachable!("powers are stored as Ast::Pow"),
                }
            }
            Ast::Pow(a, e) => {
                let x = a.series_rec(order)?;
                match integer_exponent(*e) {
                    Some(n) if n >= 0 => series_int_pow(&x, n as u32),
                    Some(n) => PowerSeries::one(x.order()).div(&series_int_pow(&x, (-n) as u32))?,
                    None => {
                        let c0 = x.coeff(0);
                        if c0.norm() < SERIES_ZERO_TOL {
                            return Err(Error::ZeroValue(c0));
                        }
                        x.scale(c0.inv()).pow(*e)?.scale((e * c0.ln()).exp())
                    }
                }
            }
            Ast::Call(f, a) => {
                let x = a.series_rec(order)?;
                match f {
                    Func::Exp => x.exp(),
                    Func::Log | Func::Sqrt => {
                        let c0 = x.coeff(0);
                        if c0.norm() < SERIES_ZERO_TOL {
                            return Err(Error::ZeroValue(c0));
                        }
                        let unit = x.scale(c0.inv());
                        if *f == Func::Log {
                            let mut coeffs = unit.log()?.into_coeffs();
                            coeffs[0] += c0.ln();
                            PowerSeries::new(coeffs)?
                        } else {
                            unit.pow(Complex64::new(0.5, 0.0))?.scale((0.5 * c0.ln()).exp())
                        }
                    }
                }
            }
        })
    }
}

/// Complex literal in a form the parser reads back exactly.
pub fn complex_literal(c: Complex64) -> String {
    format!("({:e}{:+e}i)", c.re, c.im)
}

/// Fully parenthesised rendering; re-parses to an equivalent tree.
impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ast::Var => write!(f, "z"),
            Ast::Const(c) => write!(f, "{}", complex_literal(*c)),
            Ast::Neg(a) => write!(f, "(-{a})"),
            Ast::Binary(op, a, b) => {
                let sym = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({a}{sym}{b})")
            }
            Ast::Pow(a, e) => write!(f, "({a}^{})", complex_literal(*e)),
            Ast::Call(func, a) => {
                let name = match func {
                    Func::Log => "log",
                    Func::Exp => "exp",
                    Func::Sqrt => "sqrt",
                };
                write!(f, "{name}({a})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn literal_round_trip_is_exact() {
        for c in [Complex64::new(0.1, -1e-300), Complex64::new(-2.5, 1.0 / 3.0), Complex64::new(-0.0, 0.0)] {
            let ast = parse(&complex_literal(c)).unwrap();
            assert_eq!(ast, Ast::Const(c));
            assert_eq!(ast.to_string(), complex_literal(c));
        }
    }

    #[test]
    fn series_of_dominant_quotient() {
        // (-z - 2 log(1-z))/z = 1 + Σ 2 z^n/(n+1)
        let s = parse("(-z-2*log(1-z))/z").unwrap().eval_series(40).unwrap();
        assert!((s.coeff(0) - 1.0).norm() < 1e-14);
        for n in 1..=40 {
            assert!((s.coeff(n) - 2.0 / (n + 1) as f64).norm() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn domain_errors() {
        let ast = parse("1/(1-z)").unwrap();
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(ast.eval_jet(one), Err(Error::Domain { .. })));
        assert!(matches!(parse("log(1-z)").unwrap().eval_jet(one), Err(Error::ZeroValue(_))));
        // integral powers are fine at zero
        assert_eq!(parse("z^2").unwrap().eval_jet(Complex64::default()).unwrap().f2, Complex64::new(2.0, 0.0));
    }
}
