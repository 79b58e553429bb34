use std::fmt;
use std::str::FromStr;

use super::{BinOp, Expr};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// Real part of `zeta^n / n!`.
    F,
    /// Imaginary part of `zeta^n / n!`.
    G,
}

/// One harmonic polynomial `f_n` or `g_n` centered at `center`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicBasisSpec {
    pub kind: BasisKind,
    pub degree: u32,
    pub center: [f64; 2],
}

impl HarmonicBasisSpec {
    pub fn f(degree: u32, center: [f64; 2]) -> Self {
        HarmonicBasisSpec {
            kind: BasisKind::F,
            degree,
            center,
        }
    }

    pub fn g(degree: u32, center: [f64; 2]) -> Self {
        HarmonicBasisSpec {
            kind: BasisKind::G,
            degree,
            center,
        }
    }

    /// `|d^(4k) h / d xi1^(4k)|` at the center, for every `k` where it is
    /// nonzero. Only `f_(4k)` has one, and it equals 1.
    pub fn pure_x_derivative(&self, order: u32) -> f64 {
        match self.kind {
            BasisKind::F if order == self.degree => 1.0,
            _ => 0.0,
        }
    }
}

impl fmt::Display for HarmonicBasisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            BasisKind::F => 'f',
            BasisKind::G => 'g',
        };
        write!(
            f,
            "{k}:{}:@{},{}",
            self.degree, self.center[0], self.center[1]
        )
    }
}

/// Parses `f:4:@0.5,0.5`; the `@center` part defaults to the origin.
impl FromStr for HarmonicBasisSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("basis `{s}`: {why}"));
        let mut parts = s.trim().splitn(3, ':');
        let kind = match parts.next() {
            Some("f") => BasisKind::F,
            Some("g") => BasisKind::G,
            _ => return Err(bad("kind must be f or g")),
        };
        let degree: u32 = parts
            .next()
            .and_then(|d| d.trim().parse().ok())
            .ok_or_else(|| bad("degree must be a positive integer"))?;
        let center = match parts.next() {
            None => [0.0, 0.0],
            Some(c) => {
                let c = c.trim().strip_prefix('@').unwrap_or(c);
                let xy: Vec<f64> = c
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad("center must be two numbers"))?;
                match xy.as_slice() {
                    [a, b] => [*a, *b],
                    _ => return Err(bad("center must be two numbers")),
                }
            }
        };
        if degree == 0 {
            return Err(Error::InvalidDegree(0));
        }
        Ok(HarmonicBasisSpec {
            kind,
            degree,
            center,
        })
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn shifted(var: Expr, c: f64) -> Expr {
    if c == 0.0 {
        var
    } else {
        var - Expr::Const(c)
    }
}

fn power(base: &Expr, n: u32) -> Option<Expr> {
    match n {
        0 => None,
        1 => Some(base.clone()),
        _ => Some(Expr::pow(base.clone(), n as i32)),
    }
}

/// Expands `f_n` or `g_n` about the spec's center into an ordinary tree:
///
/// ```text
/// f_n = sum_j (-1)^j u^(n-2j) v^(2j)   / ((n-2j)! (2j)!)
/// g_n = sum_j (-1)^j u^(n-2j-1) v^(2j+1) / ((n-2j-1)! (2j+1)!)
/// ```
///
/// with `u = x - center.x`, `v = y - center.y`.
pub fn harmonic_basis(spec: &HarmonicBasisSpec) -> Result<Expr> {
    let n = spec.degree;
    if n == 0 {
        return Err(Error::InvalidDegree(n));
    }
    let u = shifted(Expr::x(), spec.center[0]);
    let v = shifted(Expr::y(), spec.center[1]);
    let terms: Vec<(bool, Expr)> = match spec.kind {
        BasisKind::F => (0..=n / 2).map(|j| (n - 2 * j, 2 * j, j)).collect::<Vec<_>>(),
        BasisKind::G => (0..=(n - 1) / 2)
            .map(|j| (n - 2 * j - 1, 2 * j + 1, j))
            .collect(),
    }
    .into_iter()
    .map(|(a, b, j)| {
        let coef = 1.0 / (factorial(a) * factorial(b));
        let mono = [power(&u, a), power(&v, b)]
            .into_iter()
            .flatten()
            .reduce(|l, r| l * r)
            .expect("degree >= 1 gives at least one factor");
        let term = if coef == 1.0 {
            mono
        } else {
            Expr::Const(coef) * mono
        };
        (j % 2 == 1, term)
    })
    .collect();

    let mut iter = terms.into_iter();
    let (neg, first) = iter.next().expect("at least one term");
    let mut acc = if neg {
        Expr::Neg(Box::new(first))
    } else {
        first
    };
    for (neg, term) in iter {
        let op = if neg { BinOp::Sub } else { BinOp::Add };
        acc = Expr::binary(op, acc, term);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn degree_one_is_a_coordinate() {
        assert_eq!(
            harmonic_basis(&HarmonicBasisSpec::f(1, [0.0, 0.0])).unwrap(),
            Expr::x()
        );
        assert_eq!(
            harmonic_basis(&HarmonicBasisSpec::g(1, [0.0, 0.0])).unwrap(),
            Expr::y()
        );
    }

    #[test]
    fn rejects_degree_zero() {
        assert!(matches!(
            harmonic_basis(&HarmonicBasisSpec::f(0, [0.0, 0.0])),
            Err(Error::InvalidDegree(0))
        ));
        assert!("f:0".parse::<HarmonicBasisSpec>().is_err());
    }

    #[test]
    fn spec_text() {
        let s: HarmonicBasisSpec = "f:4:@0.5,0.5".parse().unwrap();
        assert_eq!(s, HarmonicBasisSpec::f(4, [0.5, 0.5]));
        assert_eq!(s.to_string().parse::<HarmonicBasisSpec>().unwrap(), s);
        assert_eq!(
            "g:3".parse::<HarmonicBasisSpec>().unwrap(),
            HarmonicBasisSpec::g(3, [0.0, 0.0])
        );
        assert!("h:3".parse::<HarmonicBasisSpec>().is_err());
        assert!("f:3:@1".parse::<HarmonicBasisSpec>().is_err());
    }

    #[test]
    fn printed_form_reparses() {
        let e = harmonic_basis(&HarmonicBasisSpec::g(6, [0.25, 0.75])).unwrap();
        let again = parse(&e.to_string()).unwrap();
        assert_eq!(again, e);
    }
}
