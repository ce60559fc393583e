//! Lexer and precedence-climbing parser for the formula language.
//!
//! ```text
//! expr    := expr ('+' | '-') expr | expr ('*' | '/') expr
//!          | '-' expr | expr '^' expr | atom
//! atom    := number | number 'i' | 'i' | 'z' | 'pi'
//!          | ('log' | 'exp' | 'sqrt') '(' expr ')' | '(' expr ')'
//! ```
//!
//! `+ - * /` are left-associative, `^` is right-associative and binds tighter
//! than unary minus, so `-z^2` is `-(z^2)`. Exponents must not contain `z`.

use num_complex::Complex64;

use super::ast::{Ast, BinOp, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Real(f64),
    Imag(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax { offset, message: message.into() }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let simple = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, offset: start });
            i += 1;
            continue;
        }
        if b.is_ascii_digit() || b == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part only when followed by a digit (optionally signed)
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let value: f64 = text
                .parse()
                .map_err(|_| syntax(start, format!("malformed number `{text}`")))?;
            let imaginary = i < bytes.len()
                && bytes[i] == b'i'
                && !bytes.get(i + 1).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_');
            if imaginary {
                i += 1;
                out.push(Token { tok: Tok::Imag(value), offset: start });
            } else {
                out.push(Token { tok: Tok::Real(value), offset: start });
            }
            continue;
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(src[start..i].to_string()), offset: start });
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(syntax(start, format!("unexpected character `{ch}`")));
    }
    out.push(Token { tok: Tok::End, offset: src.len() });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

const PREFIX_MINUS_BP: u8 = 5;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let t = self.next();
        match t.tok {
            Tok::RParen => Ok(()),
            Tok::End => Err(syntax(t.offset, "unexpected end of input, expected `)`")),
            _ => Err(syntax(t.offset, "expected `)`")),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Ast> {
        let mut lhs = self.prefix()?;
        loop {
            let t = self.peek().clone();
            let (op, lbp, rbp) = match t.tok {
                Tok::Plus => (BinOp::Add, 1, 2),
                Tok::Minus => (BinOp::Sub, 1, 2),
                Tok::Star => (BinOp::Mul, 3, 4),
                Tok::Slash => (BinOp::Div, 3, 4),
                Tok::Caret => (BinOp::Pow, 8, 7),
                Tok::End | Tok::RParen => break,
                _ => return Err(syntax(t.offset, "expected an operator")),
            };
            if lbp < min_bp {
                break;
            }
            self.next();
            let exponent_start = self.peek().offset;
            let rhs = self.expr(rbp)?;
            lhs = if op == BinOp::Pow {
                if rhs.contains_variable() {
                    return Err(Error::NonConstantExponent { offset: exponent_start });
                }
                let exponent = rhs.eval_value(Complex64::default())?;
                Ast::Pow(Box::new(lhs), exponent)
            } else {
                fold_literal(op, lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Ast> {
        let t = self.next();
        match t.tok {
            Tok::Real(v) => Ok(Ast::Const(Complex64::new(v, 0.0))),
            Tok::Imag(v) => Ok(Ast::Const(Complex64::new(0.0, v))),
            Tok::Minus => Ok(match self.expr(PREFIX_MINUS_BP)? {
                Ast::Const(c) => Ast::Const(-c),
                inner => Ast::Neg(Box::new(inner)),
            }),
            Tok::Plus => self.expr(PREFIX_MINUS_BP),
            Tok::LParen => {
                let inner = self.expr(0)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "z" => Ok(Ast::Var),
                "i" => Ok(Ast::Const(Complex64::new(0.0, 1.0))),
                "pi" => Ok(Ast::Const(Complex64::new(std::f64::consts::PI, 0.0))),
                "log" | "exp" | "sqrt" => {
                    let func = match name.as_str() {
                        "log" => Func::Log,
                        "exp" => Func::Exp,
                        _ => Func::Sqrt,
                    };
                    let open = self.next();
                    if open.tok != Tok::LParen {
                        return Err(syntax(open.offset, format!("expected `(` after `{name}`")));
                    }
                    let arg = self.expr(0)?;
                    self.expect_rparen()?;
                    Ok(Ast::Call(func, Box::new(arg)))
                }
                _ => Err(syntax(t.offset, format!("unknown identifier `{name}`"))),
            },
            Tok::End => Err(syntax(t.offset, "unexpected end of input")),
            _ => Err(syntax(t.offset, "expected an operand")),
        }
    }
}

/// Parses a formula in the variable `z`.
pub fn parse(formula: &str) -> Result<Ast> {
    let tokens = lex(formula)?;
    let mut p = Parser { tokens, pos: 0 };
    let ast = p.expr(0)?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(syntax(t.offset, "unbalanced `)`"));
    }
    Ok(ast)
}

/// `a + bi` and `a - bi` with real `a` and imaginary `bi` become one constant,
/// so complex literals survive a print/parse round trip.
fn fold_literal(op: BinOp, lhs: Ast, rhs: Ast) -> Ast {
    match (op, &lhs, &rhs) {
        (BinOp::Add | BinOp::Sub, Ast::Const(a), Ast::Const(b)) if a.im == 0.0 && b.re == 0.0 => {
            let im = if op == BinOp::Add { b.im } else { -b.im };
            Ast::Const(Complex64::new(a.re, im))
        }
        _ => Ast::Binary(op, Box::new(lhs), Box::new(rhs)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn koebe_parses() {
        let ast = parse("z/(1-z)^2").unwrap();
        let expected = Ast::Binary(
            BinOp::Div,
            Box::new(Ast::Var),
            Box::new(Ast::Pow(
                Box::new(Ast::Binary(
                    BinOp::Sub,
                    Box::new(Ast::Const(c(1.0, 0.0))),
                    Box::new(Ast::Var),
                )),
                c(2.0, 0.0),
            )),
        );
        assert_eq!(ast, expected);
    }

    #[test]
    fn dominant_parses() {
        let ast = parse("-z-2*log(1-z)").unwrap();
        let z = c(0.3, 0.1);
        let direct = -z - 2.0 * (1.0 - z).ln();
        assert!((ast.eval_value(z).unwrap() - direct).norm() < 1e-15);
    }

    #[test]
    fn unbalanced_parenthesis_offset() {
        assert_eq!(
            parse("z/(1-"),
            Err(Error::Syntax { offset: 5, message: "unexpected end of input".into() })
        );
        assert!(matches!(parse("(z"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("z)"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse("z $ 2"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("foo(z)"), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        let z = c(0.4, -0.3);
        let cases: [(&str, Complex64); 6] = [
            ("-z^2", -(z * z)),
            ("2^3^2", c(512.0, 0.0)),
            ("1-z-z", 1.0 - 2.0 * z),
            ("z/2/4", z / 8.0),
            ("1-2i", c(1.0, -2.0)),
            ("z^-1*2", 2.0 / z),
        ];
        for (src, want) in cases {
            let got = parse(src).unwrap().eval_value(z).unwrap();
            assert!((got - want).norm() < 1e-13, "{src}: {got} vs {want}");
        }
    }

    #[test]
    fn imaginary_literals() {
        assert_eq!(parse("i").unwrap(), Ast::Const(c(0.0, 1.0)));
        assert_eq!(parse("2.5e-1i").unwrap(), Ast::Const(c(0.0, 0.25)));
    }

    #[test]
    fn exponent_must_be_constant() {
        assert_eq!(parse("z^z"), Err(Error::NonConstantExponent { offset: 2 }));
        assert!(matches!(parse("2^(1+z)"), Err(Error::NonConstantExponent { .. })));
        assert!(parse("z^(1-i)").is_ok());
    }
}
