use super::{BinOp, Expr, Func, Var};
use crate::error::{Error, Result};

/// Value, gradient and Hessian of a scalar function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Jet2 {
            value,
            grad: [0.0; 2],
            hess: [[0.0; 2]; 2],
        }
    }

    fn variable(value: f64, axis: usize) -> Self {
        let mut j = Jet2::constant(value);
        j.grad[axis] = 1.0;
        j
    }

    pub fn laplacian(&self) -> f64 {
        self.hess[0][0] + self.hess[1][1]
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grad[0] * self.grad[0] + self.grad[1] * self.grad[1]
    }

    /// Composes with a scalar function given its value and first two
    /// derivatives at `self.value`.
    fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        let g = self.grad;
        let mut out = Jet2::constant(f);
        for i in 0..2 {
            out.grad[i] = df * g[i];
            for j in 0..2 {
                out.hess[i][j] = df * self.hess[i][j] + d2f * g[i] * g[j];
            }
        }
        out
    }

    fn add(&self, o: &Self, sign: f64) -> Self {
        let mut out = *self;
        out.value += sign * o.value;
        for i in 0..2 {
            out.grad[i] += sign * o.grad[i];
            for j in 0..2 {
                out.hess[i][j] += sign * o.hess[i][j];
            }
        }
        out
    }

    fn mul(&self, o: &Self) -> Self {
        let (a, b) = (self, o);
        let mut out = Jet2::constant(a.value * b.value);
        for i in 0..2 {
            out.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
            for j in 0..2 {
                out.hess[i][j] = a.value * b.hess[i][j]
                    + b.value * a.hess[i][j]
                    + a.grad[i] * b.grad[j]
                    + b.grad[i] * a.grad[j];
            }
        }
        out
    }

    fn scale(&self, s: f64) -> Self {
        self.chain(s * self.value, s, 0.0)
    }

    fn powi(&self, n: i32) -> Result<Self> {
        let v = self.value;
        match n {
            0 => Ok(Jet2::constant(1.0)),
            1 => Ok(*self),
            _ if n < 0 && v == 0.0 => Err(Error::Domain("zero raised to a negative power".into())),
            _ => {
                let nf = n as f64;
                Ok(self.chain(
                    v.powi(n),
                    nf * v.powi(n - 1),
                    nf * (nf - 1.0) * v.powi(n - 2),
                ))
            }
        }
    }
}

/// Evaluates value, gradient and Hessian by forward-mode propagation.
pub fn eval_jet2(e: &Expr, point: [f64; 2]) -> Result<Jet2> {
    Ok(match e {
        Expr::Const(c) => Jet2::constant(*c),
        Expr::Var(Var::X) => Jet2::variable(point[0], 0),
        Expr::Var(Var::Y) => Jet2::variable(point[1], 1),
        Expr::Neg(a) => eval_jet2(a, point)?.scale(-1.0),
        Expr::Binary(op, a, b) => {
            let (a, b) = (eval_jet2(a, point)?, eval_jet2(b, point)?);
            match op {
                BinOp::Add => a.add(&b, 1.0),
                BinOp::Sub => a.add(&b, -1.0),
                BinOp::Mul => a.mul(&b),
                BinOp::Div => {
                    let v = b.value;
                    if v == 0.0 {
                        return Err(Error::Domain("division by zero".into()));
                    }
                    a.mul(&b.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v)))
                }
            }
        }
        Expr::Pow(base, n) => eval_jet2(base, point)?.powi(*n)?,
        Expr::Call(f, arg) => {
            let a = eval_jet2(arg, point)?;
            let v = a.value;
            match f {
                Func::Sin => a.chain(v.sin(), v.cos(), -v.sin()),
                Func::Cos => a.chain(v.cos(), -v.sin(), -v.cos()),
                Func::Exp => {
                    let e = v.exp();
                    a.chain(e, e, e)
                }
                Func::Log => {
                    if v <= 0.0 {
                        return Err(Error::Domain(format!("log of non-positive value {v}")));
                    }
                    a.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
                }
                Func::Atan => {
                    let d = 1.0 + v * v;
                    a.chain(v.atan(), 1.0 / d, -2.0 * v / (d * d))
                }
                Func::Sqrt => {
                    if v <= 0.0 {
                        return Err(Error::Domain(format!(
                            "sqrt is not differentiable at {v}"
                        )));
                    }
                    let s = v.sqrt();
                    a.chain(s, 0.5 / s, -0.25 / (s * v))
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn quadratic() {
        let j = eval_jet2(&parse("x^2+y^2").unwrap(), [1.0, 2.0]).unwrap();
        assert_eq!(j.value, 5.0);
        assert_eq!(j.grad, [2.0, 4.0]);
        assert_eq!(j.laplacian(), 4.0);
    }

    #[test]
    fn bilinear() {
        let j = eval_jet2(&parse("x*y").unwrap(), [3.0, 5.0]).unwrap();
        assert_eq!(j.value, 15.0);
        assert_eq!(j.grad, [5.0, 3.0]);
        assert_eq!(j.hess[0][1], 1.0);
        assert_eq!(j.hess[1][0], 1.0);
        assert_eq!(j.laplacian(), 0.0);
    }

    #[test]
    fn quotient_and_negative_powers() {
        // 1/x = x^-1: f'' = 2/x^3.
        for src in ["1/x", "x^-1"] {
            let j = eval_jet2(&parse(src).unwrap(), [2.0, 0.0]).unwrap();
            assert!((j.value - 0.5).abs() < 1e-15);
            assert!((j.grad[0] + 0.25).abs() < 1e-15);
            assert!((j.hess[0][0] - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn domain() {
        assert!(eval_jet2(&parse("log(x-1)").unwrap(), [0.5, 0.0]).is_err());
        assert!(eval_jet2(&parse("sqrt(x)").unwrap(), [0.0, 0.0]).is_err());
        assert!(eval_jet2(&parse("x^-2").unwrap(), [0.0, 1.0]).is_err());
    }
}
