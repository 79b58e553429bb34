//! Exact stencil constants for p-neighbor averaging on square lattices.
//!
//! A stencil pair `p = (p1, p2)` with `0 <= p1 <= p2` names the class of
//! equal-sized squares whose centers are displaced by `(±p1 l, ±p2 l)` or
//! `(±p2 l, ±p1 l)`. Everything in this module is exact: multiplicities,
//! the moments `T_p^(k)`, their bounds, the renormalization constant and the
//! mean value level are all [`Rational`]s.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, int, rat, Rational};

/// Largest `k` checked by [`mean_value_level`] when the caller has no
/// preference.
pub const DEFAULT_K_MAX: u32 = 16;

/// A canonical neighbor class `(p1, p2)` with `p1 <= p2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StencilPair {
    p1: u32,
    p2: u32,
}

impl StencilPair {
    /// The identity class `(0, 0)`; its only neighbor is the square itself.
    pub const THETA: StencilPair = StencilPair { p1: 0, p2: 0 };

    /// Builds the canonical pair, sorting the components.
    pub fn new(a: u32, b: u32) -> Self {
        StencilPair {
            p1: a.min(b),
            p2: a.max(b),
        }
    }

    /// Canonicalizes signed input, rejecting negative components.
    pub fn from_signed(a: i64, b: i64) -> Result<Self> {
        if a < 0 || b < 0 || a > u32::MAX as i64 || b > u32::MAX as i64 {
            return Err(Error::NonCanonicalPair { p1: a, p2: b });
        }
        Ok(Self::new(a as u32, b as u32))
    }

    pub fn p1(self) -> u32 {
        self.p1
    }

    pub fn p2(self) -> u32 {
        self.p2
    }

    pub fn is_theta(self) -> bool {
        self.p2 == 0
    }

    /// `p1^2 + p2^2`.
    pub fn norm_sq(self) -> u64 {
        let (a, b) = (self.p1 as u64, self.p2 as u64);
        a * a + b * b
    }

    /// Number of p-neighbors of a square, `8 c_p`.
    pub fn neighbor_count(self) -> usize {
        if self.p2 == 0 {
            1
        } else if self.p1 == 0 || self.p1 == self.p2 {
            4
        } else {
            8
        }
    }
}

impl fmt::Display for StencilPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p1, self.p2)
    }
}

/// Parses a list such as `"(0,1),(1,1)"` or `"0,1; 1,1"` into canonical pairs.
pub fn parse_pairs(text: &str) -> Result<Vec<StencilPair>> {
    let mut open: Option<char> = None;
    for (k, c) in text.char_indices() {
        let bad = match (c, open) {
            ('(' | '[', None) => {
                open = Some(c);
                false
            }
            ('(' | '[', Some(_)) => true,
            (')', Some('(')) | (']', Some('[')) => {
                open = None;
                false
            }
            (')' | ']', _) => true,
            _ => false,
        };
        if bad {
            return Err(Error::Syntax {
                offset: k,
                message: format!("unbalanced `{c}`"),
            });
        }
    }
    if open.is_some() {
        return Err(Error::Syntax {
            offset: text.len(),
            message: "unclosed bracket".to_string(),
        });
    }
    let cleaned: String = text
        .chars()
        .map(|c| match c {
            '(' | ')' | '[' | ']' | ';' => ',',
            c => c,
        })
        .collect();
    let nums = cleaned
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<i64>().map_err(|_| Error::Syntax {
                offset: text.find(s).unwrap_or(0),
                message: format!("expected an integer, found `{s}`"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if nums.is_empty() || nums.len() % 2 != 0 {
        return Err(Error::Syntax {
            offset: text.len(),
            message: "pairs must be written as (p1,p2)".to_string(),
        });
    }
    nums.chunks(2)
        .map(|c| StencilPair::from_signed(c[0], c[1]))
        .collect()
}

/// Multiplicity constant `c_p`: `1/8` at the origin, `1/2` on the axes and
/// diagonal, `1` otherwise.
pub fn c_value(p: StencilPair) -> Rational {
    rat(p.neighbor_count() as i64, 8)
}

/// All displacements `(d1, d2)` (in units of the side length) of the
/// p-neighbors of a square. The list has `8 c_p` distinct entries.
pub fn neighbor_offsets(p: StencilPair) -> Vec<(i64, i64)> {
    let (a, b) = (p.p1 as i64, p.p2 as i64);
    let mut out = Vec::with_capacity(8);
    let mut seen = HashSet::with_capacity(8);
    for (u, v) in [(a, b), (b, a)] {
        for su in [1, -1] {
            for sv in [1, -1] {
                let d = (su * u, sv * v);
                if seen.insert(d) {
                    out.push(d);
                }
            }
        }
    }
    out
}

fn gaussian_pow_im(re: i64, im: i64, exp: usize) -> BigInt {
    let z = Complex::new(BigInt::from(re), BigInt::from(im));
    num_traits::pow(z, exp).im
}

/// The moment `T_p^(k)` governing the `k`-th surviving term of the harmonic
/// expansion of `I_p`.
///
/// Evaluated as `2 c_p (Im z1^n - Im z2^n + Im z3^n - Im z4^n)` with
/// `n = 4k + 2` and `z1 = (2p1+1) + i(2p2+1)`, `z2 = (2p1-1) + i(2p2+1)`,
/// `z3 = (2p1-1) + i(2p2-1)`, `z4 = (2p1+1) + i(2p2-1)`, in exact
/// Gaussian-integer arithmetic.
pub fn t_pk(p: StencilPair, k: u32) -> Rational {
    let n = 4 * k as usize + 2;
    let (a, b) = (2 * p.p1 as i64, 2 * p.p2 as i64);
    let sum = gaussian_pow_im(a + 1, b + 1, n) - gaussian_pow_im(a - 1, b + 1, n)
        + gaussian_pow_im(a - 1, b - 1, n)
        - gaussian_pow_im(a + 1, b - 1, n);
    Rational::from_integer(sum) * c_value(p) * int(2)
}

/// The closed trigonometric form of `T_p^(k)`, in floating point. Kept as a
/// cross-check of [`t_pk`]; it is not exact.
pub fn t_pk_sine(p: StencilPair, k: u32) -> f64 {
    let n = (4 * k + 2) as f64;
    let e = 2 * k as i32 + 1;
    let term = |a: f64, b: f64| (a * a + b * b).powi(e) * (n * b.atan2(a)).sin();
    let (a, b) = (2.0 * p.p1 as f64, 2.0 * p.p2 as f64);
    let c = rational::to_f64(&c_value(p));
    2.0 * c * (term(a + 1.0, b + 1.0) - term(a - 1.0, b + 1.0) + term(a - 1.0, b - 1.0)
        - term(a + 1.0, b - 1.0))
}

/// `8 c_p |2p + (1,1)|^(4k+2)`, the a priori bound on `|T_p^(k)|`.
pub fn t_bound(p: StencilPair, k: u32) -> Rational {
    let (a, b) = (2 * p.p1 as i64 + 1, 2 * p.p2 as i64 + 1);
    let base = BigInt::from(a * a + b * b);
    let pow = num_traits::pow(base, 2 * k as usize + 1);
    Rational::from_integer(pow) * c_value(p) * int(8)
}

/// `(1/2) (sum_p |p|^2 c_p A_p)^-1`.
pub fn renorm_constant(pairs: &[StencilPair], coefficients: &[Rational]) -> Result<Rational> {
    check_lengths(pairs, coefficients)?;
    let sum = pairs
        .iter()
        .zip(coefficients)
        .fold(Rational::zero(), |acc, (p, a)| {
            acc + int(p.norm_sq() as i64) * c_value(*p) * a
        });
    if sum.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok((sum * int(2)).recip())
}

/// Outcome of a mean value level search up to some `k_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeanValueLevel {
    /// The first `k` whose moment constraint fails.
    Exact(u32),
    /// Every constraint through `k_max` holds; the level is at least this.
    AtLeast(u32),
}

impl MeanValueLevel {
    pub fn exact(self) -> Option<u32> {
        match self {
            MeanValueLevel::Exact(n) => Some(n),
            MeanValueLevel::AtLeast(_) => None,
        }
    }

    /// The level itself, or its lower bound.
    pub fn lower_bound(self) -> u32 {
        match self {
            MeanValueLevel::Exact(n) | MeanValueLevel::AtLeast(n) => n,
        }
    }
}

impl fmt::Display for MeanValueLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanValueLevel::Exact(n) => write!(f, "{n}"),
            MeanValueLevel::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

/// `T_theta^(k) - sum_p A_p T_p^(k)`: the exact moment defect at order `k`.
pub fn moment_defect(pairs: &[StencilPair], coefficients: &[Rational], k: u32) -> Rational {
    let combo = pairs
        .iter()
        .zip(coefficients)
        .fold(Rational::zero(), |acc, (p, a)| acc + a * t_pk(*p, k));
    t_pk(StencilPair::THETA, k) - combo
}

/// Least `k <= k_max` with `sum_p A_p T_p^(k) != T_theta^(k)`.
///
/// Level 0 means the normalization `8 sum c_p A_p = 1` itself fails, since
/// `T_p^(0) = 16 c_p`.
pub fn mean_value_level(
    pairs: &[StencilPair],
    coefficients: &[Rational],
    k_max: u32,
) -> MeanValueLevel {
    (0..=k_max)
        .find(|&k| !moment_defect(pairs, coefficients, k).is_zero())
        .map_or(MeanValueLevel::AtLeast(k_max + 1), MeanValueLevel::Exact)
}

fn check_lengths(pairs: &[StencilPair], coefficients: &[Rational]) -> Result<()> {
    if pairs.len() != coefficients.len() {
        return Err(Error::LengthMismatch {
            pairs: pairs.len(),
            coefficients: coefficients.len(),
        });
    }
    Ok(())
}

/// Rejects the origin pair and duplicates.
pub fn validate_pairs(pairs: &[StencilPair]) -> Result<()> {
    let mut seen = HashSet::new();
    for p in pairs {
        if p.is_theta() {
            return Err(Error::NonCanonicalPair {
                p1: p.p1 as i64,
                p2: p.p2 as i64,
            });
        }
        if !seen.insert(*p) {
            return Err(Error::DuplicatePair { p1: p.p1, p2: p.p2 });
        }
    }
    Ok(())
}

/// A normalized family of stencil pairs with coefficients `A_p`.
///
/// Construction enforces `8 sum c_p A_p = 1` exactly and derives the
/// renormalization constant `M_P` and the mean value level.
#[derive(Clone, Debug, PartialEq)]
pub struct StencilFamily {
    pairs: Vec<StencilPair>,
    coefficients: Vec<Rational>,
    renorm: Rational,
    level: MeanValueLevel,
}

impl StencilFamily {
    pub fn new(pairs: Vec<StencilPair>, coefficients: Vec<Rational>) -> Result<Self> {
        Self::with_k_max(pairs, coefficients, DEFAULT_K_MAX)
    }

    pub fn with_k_max(
        pairs: Vec<StencilPair>,
        coefficients: Vec<Rational>,
        k_max: u32,
    ) -> Result<Self> {
        check_lengths(&pairs, &coefficients)?;
        validate_pairs(&pairs)?;
        let norm = pairs
            .iter()
            .zip(&coefficients)
            .fold(Rational::zero(), |acc, (p, a)| acc + c_value(*p) * a)
            * int(8);
        if !norm.is_one() {
            return Err(Error::NormalizationViolated {
                got: rational::to_text(&norm),
            });
        }
        let renorm = renorm_constant(&pairs, &coefficients)?;
        let level = mean_value_level(&pairs, &coefficients, k_max);
        Ok(StencilFamily {
            pairs,
            coefficients,
            renorm,
            level,
        })
    }

    /// Parses inline `--pairs` / `--coeffs` style text.
    pub fn parse_inline(pairs: &str, coefficients: &str) -> Result<Self> {
        let pairs = parse_pairs(pairs)?;
        let coefficients = coefficients
            .split(',')
            .map(rational::parse)
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs, coefficients)
    }

    pub fn pairs(&self) -> &[StencilPair] {
        &self.pairs
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn renorm(&self) -> &Rational {
        &self.renorm
    }

    pub fn level(&self) -> MeanValueLevel {
        self.level
    }

    /// Largest `p2` over the family: the stencil's reach in cells.
    pub fn reach(&self) -> u32 {
        self.pairs.iter().map(|p| p.p2).max().unwrap_or(0)
    }

    /// `max_p |2p + (1,1)|`.
    pub fn spread(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| {
                let (a, b) = (2.0 * p.p1 as f64 + 1.0, 2.0 * p.p2 as f64 + 1.0);
                (a * a + b * b).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Exact `T_theta^(k) - sum_p A_p T_p^(k)`.
    pub fn moment_defect(&self, k: u32) -> Rational {
        moment_defect(&self.pairs, &self.coefficients, k)
    }

    /// `(offset, weight)` for every neighbor of every pair, weights `A_p` as
    /// `f64`. Pairs keep their input order; offsets follow
    /// [`neighbor_offsets`].
    pub fn weighted_offsets(&self) -> Vec<((i64, i64), f64)> {
        self.pairs
            .iter()
            .zip(&self.coefficients)
            .flat_map(|(p, a)| {
                let w = rational::to_f64(a);
                neighbor_offsets(*p).into_iter().map(move |d| (d, w))
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&StencilFile::from(self))?)
    }

    /// Reads the JSON form, recomputing `renorm` and `level` and rejecting a
    /// file whose stored values disagree with them.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StencilFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// On-disk form of a [`StencilFamily`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StencilFile {
    pub pairs: Vec<[i64; 2]>,
    #[serde(with = "rational::text_vec")]
    pub coefficients: Vec<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub renorm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub level_is_lower_bound: bool,
}

impl From<&StencilFamily> for StencilFile {
    fn from(s: &StencilFamily) -> Self {
        StencilFile {
            pairs: s
                .pairs
                .iter()
                .map(|p| [p.p1 as i64, p.p2 as i64])
                .collect(),
            coefficients: s.coefficients.clone(),
            renorm: Some(rational::to_text(&s.renorm)),
            level: Some(s.level.lower_bound()),
            level_is_lower_bound: matches!(s.level, MeanValueLevel::AtLeast(_)),
        }
    }
}

impl TryFrom<StencilFile> for StencilFamily {
    type Error = Error;

    fn try_from(file: StencilFile) -> Result<Self> {
        let pairs = file
            .pairs
            .iter()
            .map(|[a, b]| StencilPair::from_signed(*a, *b))
            .collect::<Result<Vec<_>>>()?;
        let family = StencilFamily::new(pairs, file.coefficients)?;
        if let Some(stored) = &file.renorm {
            let stored_value = rational::parse(stored)?;
            if stored_value != family.renorm {
                return Err(Error::InconsistentStencil {
                    field: "renorm",
                    stored: stored.clone(),
                    computed: rational::to_text(&family.renorm),
                });
            }
        }
        if let Some(stored) = file.level {
            if stored != family.level.lower_bound() {
                return Err(Error::InconsistentStencil {
                    field: "level",
                    stored: stored.to_string(),
                    computed: family.level.to_string(),
                });
            }
        }
        Ok(family)
    }
}

/// `|T_p^(k)| <= t_bound(p, k)`, compared exactly.
pub fn within_bound(p: StencilPair, k: u32) -> bool {
    t_pk(p, k).abs() <= t_bound(p, k)
}
