//! Scalar functions of `(x, y)`: a small expression language, its evaluator
//! in any [`Real`] arithmetic, and second-order derivative jets.

mod basis;
mod jet;
mod parser;

use std::fmt;

pub use basis::{harmonic_basis, BasisKind, HarmonicBasisSpec};
pub use jet::{eval_jet2, Jet2};
pub use parser::parse;

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Atan,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Atan => "atan",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "atan" => Func::Atan,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Parsed expression tree. Exponents are integer constants.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::Var(Var::Y)
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn pow(base: Expr, exponent: i32) -> Expr {
        Expr::Pow(Box::new(base), exponent)
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// Evaluates at `(x, y)` in arithmetic `T`.
    pub fn eval_in<T: Real>(&self, x: &T, y: &T) -> Result<T> {
        Ok(match self {
            Expr::Const(c) => T::from_f64(*c),
            Expr::Var(Var::X) => x.clone(),
            Expr::Var(Var::Y) => y.clone(),
            Expr::Neg(a) => a.eval_in(x, y)?.neg(),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval_in(x, y)?, b.eval_in(x, y)?);
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => {
                        if b.is_zero() {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        a.div(&b)
                    }
                }
            }
            Expr::Pow(base, n) => {
                let b = base.eval_in(x, y)?;
                if *n >= 0 {
                    b.powi(*n as u32)
                } else if b.is_zero() {
                    return Err(Error::Domain("zero raised to a negative power".into()));
                } else {
                    T::one().div(&b.powi(n.unsigned_abs()))
                }
            }
            Expr::Call(f, arg) => {
                let v = arg.eval_in(x, y)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Atan => v.atan(),
                    Func::Log => {
                        if v.is_negative() || v.is_zero() {
                            return Err(Error::Domain(format!(
                                "log of non-positive value {}",
                                v.to_f64()
                            )));
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if v.is_negative() {
                            return Err(Error::Domain(format!(
                                "sqrt of negative value {}",
                                v.to_f64()
                            )));
                        }
                        v.sqrt()
                    }
                }
            }
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.eval_in(&x, &y)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Add, self, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Sub, self, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Mul, self, rhs)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(-{})", -c)
            }
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.fmt_child(f, 3)
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                a.fmt_child(f, p)?;
                write!(f, "{}", op.symbol())?;
                // Left-associative: an equal-precedence right operand needs parens.
                b.fmt_child(f, p + 1)
            }
            Expr::Pow(base, n) => {
                base.fmt_child(f, 5)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_simple_forms() {
        assert_eq!(parse("x^2+y^2").unwrap().eval(1.0, 2.0).unwrap(), 5.0);
        assert_eq!(parse("x*y - 1/x").unwrap().eval(2.0, 3.0).unwrap(), 5.5);
        assert_eq!(parse("x^-2").unwrap().eval(2.0, 0.0).unwrap(), 0.25);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            parse("log(x)").unwrap().eval(-1.0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            parse("sqrt(y)").unwrap().eval(0.0, -1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            parse("1/(x-y)").unwrap().eval(1.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert_eq!(parse("sqrt(x)").unwrap().eval(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn display_keeps_structure() {
        for src in [
            "x-(y-x)",
            "x/(y*x)",
            "-x^2",
            "(-x)^2",
            "(x^2)^3",
            "sin(x)*exp(y)",
            "x^-3+0.5*y",
            "--x",
            "2*(x+y)",
        ] {
            let tree = parse(src).unwrap();
            assert_eq!(parse(&tree.to_string()).unwrap(), tree, "{src}");
        }
    }

    #[test]
    fn builder_negative_constants_print_parenthesized() {
        let e = Expr::Const(-0.5) * Expr::x();
        assert_eq!(e.to_string(), "(-0.5)*x");
        assert_eq!(parse(&e.to_string()).unwrap().eval(2.0, 0.0).unwrap(), -1.0);
    }
}
