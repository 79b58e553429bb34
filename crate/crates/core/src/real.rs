//! Scalar arithmetic used by the quadrature and expression evaluators.
//!
//! Everything numerical is written once against [`Real`] and instantiated
//! either with `f64` or with [`Extended`], a 256-bit binary float. The wide
//! type exists for mean value defects, which fall many orders of magnitude
//! below the double-precision rounding floor at fine scales.

use std::cell::RefCell;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::rational::{self, Rational};

pub trait Real: Clone + Send + Sync + fmt::Debug + 'static {
    /// Unit roundoff of the representation.
    const EPSILON: f64;

    fn from_f64(v: f64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn powi(&self, n: u32) -> Self;

    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn atan(&self) -> Self;
    fn sqrt(&self) -> Self;

    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn abs(&self) -> Self {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON / 2.0;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_rational(r: &Rational) -> Self {
        rational::to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn powi(&self, n: u32) -> Self {
        f64::powi(*self, n as i32)
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn atan(&self) -> Self {
        f64::atan(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
}

/// Working precision of [`Extended`], in bits.
pub const EXTENDED_BITS: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// A 256-bit binary floating point number.
#[derive(Clone, Debug)]
pub struct Extended(BigFloat);

impl Extended {
    fn parse_decimal(text: &str) -> Self {
        Extended(with_consts(|cc| {
            BigFloat::parse(text, Radix::Dec, EXTENDED_BITS, RM, cc)
        }))
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Real for Extended {
    const EPSILON: f64 = 8.636168555094445e-78; // 2^-256

    fn from_f64(v: f64) -> Self {
        Extended(BigFloat::from_f64(v, EXTENDED_BITS))
    }

    fn from_rational(r: &Rational) -> Self {
        let n = Self::parse_decimal(&r.numer().to_string());
        let d = Self::parse_decimal(&r.denom().to_string());
        n.div(&d)
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        // Decimal text carries all 256 bits; the std parser rounds correctly.
        self.0.to_string().parse().unwrap_or(f64::NAN)
    }

    fn add(&self, o: &Self) -> Self {
        Extended(self.0.add(&o.0, EXTENDED_BITS, RM))
    }
    fn sub(&self, o: &Self) -> Self {
        Extended(self.0.sub(&o.0, EXTENDED_BITS, RM))
    }
    fn mul(&self, o: &Self) -> Self {
        Extended(self.0.mul(&o.0, EXTENDED_BITS, RM))
    }
    fn div(&self, o: &Self) -> Self {
        Extended(self.0.div(&o.0, EXTENDED_BITS, RM))
    }
    fn neg(&self) -> Self {
        Extended(self.0.neg())
    }
    fn powi(&self, n: u32) -> Self {
        Extended(self.0.powi(n as usize, EXTENDED_BITS, RM))
    }
    fn sin(&self) -> Self {
        Extended(with_consts(|cc| self.0.sin(EXTENDED_BITS, RM, cc)))
    }
    fn cos(&self) -> Self {
        Extended(with_consts(|cc| self.0.cos(EXTENDED_BITS, RM, cc)))
    }
    fn exp(&self) -> Self {
        Extended(with_consts(|cc| self.0.exp(EXTENDED_BITS, RM, cc)))
    }
    fn ln(&self) -> Self {
        Extended(with_consts(|cc| self.0.ln(EXTENDED_BITS, RM, cc)))
    }
    fn atan(&self) -> Self {
        Extended(with_consts(|cc| self.0.atan(EXTENDED_BITS, RM, cc)))
    }
    fn sqrt(&self) -> Self {
        Extended(self.0.sqrt(EXTENDED_BITS, RM))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

/// Arithmetic used for a computation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Precision {
    Double,
    #[default]
    Extended,
}

impl Precision {
    pub fn epsilon(self) -> f64 {
        match self {
            Precision::Double => <f64 as Real>::EPSILON,
            Precision::Extended => <Extended as Real>::EPSILON,
        }
    }
}
