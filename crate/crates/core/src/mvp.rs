//! Mean value defects `I(h,x,l) - sum_p A_p I_p(h,x,l)` of harmonic
//! functions, their a priori bound, convergence-order fits, and the
//! exactness sweep over the harmonic polynomial basis.
//!
//! Defects shrink like `l^(4N)` for a level-`N` family, so at fine scales
//! they sit far below the double-precision rounding floor. By default they
//! are evaluated in [`Extended`] arithmetic and only the final value is
//! rounded to `f64`.

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{harmonic_basis, BasisKind, Expr, HarmonicBasisSpec};
use crate::fit::log_log_fit;
use crate::grid::DEFAULT_QUAD_ORDER;
use crate::quadrature::GaussLegendre;
use crate::rational::{self, Rational};
use crate::real::{Extended, Precision, Real};
use crate::stencil::{neighbor_offsets, StencilFamily};

/// Relative rounding floor for double precision: defects below
/// `FLOOR_FACTOR * scale` are treated as exact zeros.
pub const FLOOR_FACTOR: f64 = 1e-12;

/// Default truncation index of the defect bound.
pub const DEFAULT_BOUND_TERMS: u32 = 6;

/// Absolute tolerance for defects that must vanish in the exactness sweep.
pub const ZERO_DEFECT_TOL: f64 = 1e-10;

/// Relative tolerance for the `f_4N` defect against its closed form.
pub const CLOSED_FORM_RTOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectOptions {
    pub quad_order: usize,
    pub precision: Precision,
}

impl Default for DefectOptions {
    fn default() -> Self {
        DefectOptions {
            quad_order: DEFAULT_QUAD_ORDER,
            precision: Precision::Extended,
        }
    }
}

/// The rounding floor for a quantity of magnitude `scale` computed in
/// `precision`.
pub fn rounding_floor(scale: f64, precision: Precision) -> f64 {
    FLOOR_FACTOR * scale * precision.epsilon() / Precision::Double.epsilon()
}

/// Errors unless every p-neighbor of `D(x, l)` lies in the unit square.
pub fn check_support(x: [f64; 2], l: f64, stencil: &StencilFamily) -> Result<()> {
    let reach = (stencil.reach() as f64 + 0.5) * l;
    let inside = |c: f64| c - reach >= 0.0 && c + reach <= 1.0;
    if l > 0.0 && inside(x[0]) && inside(x[1]) {
        Ok(())
    } else {
        Err(Error::NeighborOutOfDomain {
            x: x[0],
            y: x[1],
            side: l,
        })
    }
}

/// `(defect, scale)` where `scale` is the largest magnitude among the
/// averages that were combined.
fn defect_in<T: Real>(
    h: &Expr,
    x: [f64; 2],
    l: f64,
    stencil: &StencilFamily,
    rule: &GaussLegendre<T>,
) -> Result<(T, f64)> {
    let side = T::from_f64(l);
    let cx = T::from_f64(x[0]);
    let cy = T::from_f64(x[1]);
    let at = |d1: i64, d2: i64| {
        let c = [
            cx.add(&side.mul(&T::from_f64(d1 as f64))),
            cy.add(&side.mul(&T::from_f64(d2 as f64))),
        ];
        rule.average(h, c, &side)
    };
    let own = at(0, 0)?;
    let mut scale = own.to_f64().abs();
    let mut combo = T::zero();
    for (p, a) in stencil.pairs().iter().zip(stencil.coefficients()) {
        let mut ip = T::zero();
        for (d1, d2) in neighbor_offsets(*p) {
            ip = ip.add(&at(d1, d2)?);
        }
        let term = T::from_rational(a).mul(&ip);
        scale = scale.max(term.to_f64().abs());
        combo = combo.add(&term);
    }
    Ok((own.sub(&combo), scale))
}

/// `I(h,x,l) - sum_p A_p I_p(h,x,l)`.
pub fn defect(
    h: &Expr,
    x: [f64; 2],
    l: f64,
    stencil: &StencilFamily,
    opts: &DefectOptions,
) -> Result<f64> {
    Ok(measure(h, x, l, stencil, opts)?.0)
}

/// Defect and the rounding floor that applies to it.
fn measure(
    h: &Expr,
    x: [f64; 2],
    l: f64,
    stencil: &StencilFamily,
    opts: &DefectOptions,
) -> Result<(f64, f64)> {
    check_support(x, l, stencil)?;
    let (d, scale) = match opts.precision {
        Precision::Double => {
            let rule = GaussLegendre::<f64>::new(opts.quad_order)?;
            defect_in(h, x, l, stencil, &rule)?
        }
        Precision::Extended => {
            let rule = GaussLegendre::<Extended>::new(opts.quad_order)?;
            let (d, s) = defect_in(h, x, l, stencil, &rule)?;
            (d.to_f64(), s)
        }
    };
    Ok((d, rounding_floor(scale, opts.precision)))
}

/// Certified magnitudes of the pure derivatives `∂^(4k) h / ∂ξ1^(4k)` at the
/// expansion center.
#[derive(Clone, Debug, PartialEq)]
pub enum DerivativeBounds {
    /// `|∂^(4k) h| <= magnitude * growth^(4k)` for every `k`.
    Geometric { magnitude: f64, growth: f64 },
    /// `(k, |∂^(4k) h|)` for the finitely many nonzero orders.
    Finite(Vec<(u32, f64)>),
}

impl DerivativeBounds {
    /// Harmonic polynomials: only `f_(4k)` has a nonzero pure derivative.
    pub fn for_basis(spec: &HarmonicBasisSpec) -> Self {
        match spec.kind {
            BasisKind::F if spec.degree % 4 == 0 => {
                DerivativeBounds::Finite(vec![(spec.degree / 4, spec.pure_x_derivative(spec.degree))])
            }
            _ => DerivativeBounds::Finite(Vec::new()),
        }
    }

    /// `sin(a x) e^(a y)`-type functions: `|∂^(4k) h(x)| <= e^(a x2) a^(4k)`.
    pub fn exponential(magnitude: f64, growth: f64) -> Self {
        DerivativeBounds::Geometric { magnitude, growth }
    }

    fn at(&self, k: u32) -> f64 {
        match self {
            DerivativeBounds::Geometric { magnitude, growth } => {
                magnitude * f64::powi(*growth, 4 * k as i32)
            }
            DerivativeBounds::Finite(v) => v
                .iter()
                .filter(|(kk, _)| *kk == k)
                .map(|(_, b)| *b)
                .sum(),
        }
    }
}

/// The bound's `K`-term partial sum and a certified tail estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundEstimate {
    pub partial: f64,
    pub tail: f64,
}

impl BoundEstimate {
    pub fn total(&self) -> f64 {
        self.partial + self.tail
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// One term `(1/(4k+2)!) D_k (2^(2k+1) + |P|^(4k+2)) (l/2)^(4k)`, in logs to
/// survive large `k`.
fn bound_term(d: f64, spread: f64, l: f64, k: u32) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    let kf = k as f64;
    let a = (2.0 * kf + 1.0) * 2f64.ln();
    let b = (4.0 * kf + 2.0) * spread.ln();
    let mix = a.max(b) + (-(a - b).abs()).exp().ln_1p();
    (d.ln() + mix + 4.0 * kf * (l / 2.0).ln() - ln_factorial(4 * k + 2)).exp()
}

/// Upper bound on `|I(h,x,l) - sum_p A_p I_p(h,x,l)|`:
///
/// `sum_{k=N}^{K} (1/(4k+2)!) |∂^(4k) h(x)| (2^(2k+1) + |P|^(4k+2)) (l/2)^(4k)`
///
/// with `|P| = max_p |2p + (1,1)|`, plus a ratio-test tail beyond `K`.
pub fn defect_bound(
    bounds: Option<&DerivativeBounds>,
    l: f64,
    stencil: &StencilFamily,
    terms: u32,
) -> Result<BoundEstimate> {
    let bounds = bounds.ok_or(Error::UnboundedDerivatives)?;
    let n = stencil.level().lower_bound().max(1);
    let last = terms.max(n);
    let spread = stencil.spread();
    let partial: f64 = (n..=last)
        .map(|k| bound_term(bounds.at(k), spread, l, k))
        .sum();
    let tail = match bounds {
        DerivativeBounds::Finite(v) => v
            .iter()
            .filter(|(k, _)| *k > last)
            .map(|(k, d)| bound_term(*d, spread, l, *k))
            .sum(),
        DerivativeBounds::Geometric { growth, .. } => {
            // t_{k+1}/t_k <= growth^4 (l/2)^4 max(4, |P|^4) / ((4k+3)(4k+4)(4k+5)(4k+6)),
            // decreasing in k.
            let k = last as f64;
            let ratio = growth.powi(4) * (l / 2.0).powi(4) * spread.powi(4).max(4.0)
                / ((4.0 * k + 3.0) * (4.0 * k + 4.0) * (4.0 * k + 5.0) * (4.0 * k + 6.0));
            let t_last = bound_term(bounds.at(last), spread, l, last);
            if ratio < 1.0 {
                t_last * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            }
        }
    };
    Ok(BoundEstimate { partial, tail })
}

/// One measured defect.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefectSample {
    pub center: [f64; 2],
    pub side: f64,
    pub defect: f64,
    pub bound: Option<f64>,
    /// Magnitudes at or below this are indistinguishable from zero.
    pub floor: f64,
}

/// Measures the defect of `h` at each side length, in parallel. `bounds`,
/// when given, fills in [`DefectSample::bound`].
pub fn defect_samples(
    h: &Expr,
    x: [f64; 2],
    sides: &[f64],
    stencil: &StencilFamily,
    bounds: Option<&DerivativeBounds>,
    opts: &DefectOptions,
) -> Result<Vec<DefectSample>> {
    sides
        .par_iter()
        .map(|&l| {
            let (defect, floor) = measure(h, x, l, stencil, opts)?;
            let bound = match bounds {
                Some(b) => Some(defect_bound(Some(b), l, stencil, DEFAULT_BOUND_TERMS)?.total()),
                None => None,
            };
            Ok(DefectSample {
                center: x,
                side: l,
                defect,
                bound,
                floor,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderFit {
    pub sides: Vec<f64>,
    pub defects: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Samples within this factor of their rounding floor are left out of fits.
pub const FIT_FLOOR_MARGIN: f64 = 10.0;

/// Least-squares slope of `ln |defect|` against `ln l`, over the samples
/// clearly above their rounding floor (which must number at least three).
pub fn fit_order(samples: &[DefectSample]) -> Result<OrderFit> {
    let kept: Vec<&DefectSample> = samples
        .iter()
        .filter(|s| s.defect.abs() > FIT_FLOOR_MARGIN * s.floor)
        .collect();
    if kept.is_empty() && !samples.is_empty() {
        return Err(Error::AllBelowFloor);
    }
    if kept.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: kept.len(),
        });
    }
    let sides: Vec<f64> = kept.iter().map(|s| s.side).collect();
    let defects: Vec<f64> = kept.iter().map(|s| s.defect).collect();
    let line = log_log_fit(&sides, &defects)?;
    Ok(OrderFit {
        sides,
        defects,
        slope: line.slope,
        intercept: line.intercept,
        r_squared: line.r_squared,
    })
}

/// Exact `(T_theta^(k) - sum_p A_p T_p^(k)) / (4k+2)!`: the coefficient of
/// `(l/2)^(4k)` in the defect of `f_(4k)`.
pub fn closed_form_coefficient(stencil: &StencilFamily, k: u32) -> Rational {
    let fact: num_bigint::BigInt = (1..=(4 * k + 2) as u64).map(num_bigint::BigInt::from).product();
    stencil.moment_defect(k) / Rational::from_integer(fact)
}

/// Closed-form defect of `f_(4k)` at side `l`, evaluated in extended
/// precision and rounded once.
pub fn closed_form_defect(stencil: &StencilFamily, k: u32, l: f64) -> f64 {
    let c = Extended::from_rational(&closed_form_coefficient(stencil, k));
    c.mul(&Extended::from_f64(l / 2.0).powi(4 * k)).to_f64()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepStatus {
    Pass,
    Fail,
    /// Closed form and measurement are both below the rounding floor.
    BelowFloor,
}

impl SweepStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepStatus::Pass => "pass",
            SweepStatus::Fail => "FAIL",
            SweepStatus::BelowFloor => "below_floor",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub kind: BasisKind,
    pub degree: u32,
    pub defect: f64,
    pub closed_form: Option<f64>,
    pub status: SweepStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub level: u32,
    pub center: [f64; 2],
    pub side: f64,
    /// Exact coefficient of `(l/2)^(4N)` in the `f_4N` defect; nonzero.
    pub leading_coefficient: Rational,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.status != SweepStatus::Fail)
    }
}

/// Defects of `f_n` and `g_n` (both centered at `x`) for `n = 1..=4N`.
///
/// All of them must vanish except `f_4N`, whose defect must match
/// [`closed_form_defect`].
pub fn exactness_sweep(
    stencil: &StencilFamily,
    x: [f64; 2],
    l: f64,
    opts: &DefectOptions,
) -> Result<SweepReport> {
    let level = stencil
        .level()
        .exact()
        .ok_or(Error::LevelUnknown(stencil.level().lower_bound()))?;
    if level == 0 {
        return Err(Error::InvalidArgument("stencil is not normalized (level 0)".into()));
    }
    check_support(x, l, stencil)?;
    let top = 4 * level;
    let specs: Vec<HarmonicBasisSpec> = (1..=top)
        .flat_map(|n| [HarmonicBasisSpec::f(n, x), HarmonicBasisSpec::g(n, x)])
        .collect();
    let rows = specs
        .par_iter()
        .map(|spec| {
            let h = harmonic_basis(spec)?;
            let (d, floor) = measure(&h, x, l, stencil, opts)?;
            let expect_nonzero = spec.kind == BasisKind::F && spec.degree == top;
            let (closed_form, status) = if expect_nonzero {
                let cf = closed_form_defect(stencil, level, l);
                let status = if cf.abs() <= floor {
                    if d.abs() <= floor.max(ZERO_DEFECT_TOL) {
                        SweepStatus::BelowFloor
                    } else {
                        SweepStatus::Fail
                    }
                } else if (d - cf).abs() <= CLOSED_FORM_RTOL * cf.abs() {
                    SweepStatus::Pass
                } else {
                    SweepStatus::Fail
                };
                (Some(cf), status)
            } else if d.abs() <= ZERO_DEFECT_TOL {
                (None, SweepStatus::Pass)
            } else {
                (None, SweepStatus::Fail)
            };
            Ok(SweepRow {
                kind: spec.kind,
                degree: spec.degree,
                defect: d,
                closed_form,
                status,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let leading_coefficient = closed_form_coefficient(stencil, level);
    debug_assert!(!leading_coefficient.is_zero());
    Ok(SweepReport {
        level,
        center: x,
        side: l,
        leading_coefficient,
        rows,
    })
}

/// `|T_theta^(k) - sum A_p T_p^(k)| <= 2^(2k+1) + |P|^(4k+2)`, checked in
/// floating point (the right side is irrational in general).
pub fn moment_defect_within_bound(stencil: &StencilFamily, k: u32) -> bool {
    let lhs = rational::to_f64(&stencil.moment_defect(k).abs());
    let rhs = 2f64.powi(2 * k as i32 + 1) + stencil.spread().powi(4 * k as i32 + 2);
    lhs <= rhs * (1.0 + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::rational::rat;
    use crate::stencil::StencilPair;

    fn axis() -> StencilFamily {
        StencilFamily::new(vec![StencilPair::new(0, 1)], vec![rat(1, 4)]).unwrap()
    }

    #[test]
    fn support_check() {
        let s = axis();
        assert!(check_support([0.5, 0.5], 0.25, &s).is_ok());
        assert!(matches!(
            check_support([0.5, 0.5], 0.5, &s),
            Err(Error::NeighborOutOfDomain { .. })
        ));
        let h = parse("x").unwrap();
        assert!(defect(&h, [0.1, 0.5], 0.125, &s, &DefectOptions::default()).is_err());
    }

    #[test]
    fn floor_scales_with_precision() {
        assert_eq!(rounding_floor(2.0, Precision::Double), 2e-12);
        assert!(rounding_floor(2.0, Precision::Extended) < 1e-70);
    }

    #[test]
    fn fit_errors() {
        let sample = |defect| DefectSample {
            center: [0.5, 0.5],
            side: 0.1,
            defect,
            bound: None,
            floor: 1e-12,
        };
        assert!(matches!(fit_order(&[sample(0.0), sample(1e-14)]), Err(Error::AllBelowFloor)));
        assert!(matches!(
            fit_order(&[sample(1.0), sample(1e-14)]),
            Err(Error::InsufficientSamples { got: 1, .. })
        ));
    }

    #[test]
    fn bound_requires_derivatives() {
        assert!(matches!(
            defect_bound(None, 0.1, &axis(), 6),
            Err(Error::UnboundedDerivatives)
        ));
        let cubic = DerivativeBounds::for_basis(&HarmonicBasisSpec::f(3, [0.5, 0.5]));
        let b = defect_bound(Some(&cubic), 0.1, &axis(), 6).unwrap();
        assert_eq!(b.total(), 0.0);
    }

    #[test]
    fn level_must_be_exact_for_sweep() {
        // Published N=1 family has level exactly 1.
        assert!(exactness_sweep(&axis(), [0.5, 0.5], 0.0625, &DefectOptions {
            quad_order: 4,
            precision: Precision::Double
        })
        .is_ok());
    }
}
