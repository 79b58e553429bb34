//! The acceptance suite: nine reproducibility criteria, each returning a
//! verdict with its key measurements.

use std::time::Instant;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;
use crate::expr::{eval_jet2, harmonic_basis, parse, BasisKind, HarmonicBasisSpec};
use crate::fit::log_log_fit;
use crate::forms::{discrete_laplacian, energy, laplacian_max_error};
use crate::grid::{center_of, grid_averages, interior_mask, neighbor_average_sum, side_at, DEFAULT_QUAD_ORDER};
use crate::mvp::{
    defect_samples, exactness_sweep, fit_order, DefectOptions, DerivativeBounds, SweepStatus,
};
use crate::quadrature::GaussLegendre;
use crate::rational::{self, rat, Rational};
use crate::solver::{solve_level, SolutionKind};
use crate::stencil::{t_pk, StencilFamily, StencilPair};

/// How much of each sweep to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Shortened level ranges for a fast smoke check.
    Quick,
    /// The ranges stated by each criterion.
    Full,
}

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub criterion: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Wall time budget in seconds; kept out of the JSON so that reports are
    /// reproducible byte for byte.
    #[serde(skip)]
    pub budget_seconds: f64,
    #[serde(skip)]
    pub seconds: f64,
    pub detail: String,
    pub metrics: Value,
}

impl Verdict {
    pub fn status(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn within_budget(&self) -> bool {
        self.seconds <= self.budget_seconds
    }
}

struct Outcome {
    passed: bool,
    detail: String,
    metrics: Value,
}

fn timed(
    criterion: u8,
    title: &'static str,
    budget_seconds: f64,
    run: impl FnOnce() -> Result<Outcome>,
) -> Verdict {
    let start = Instant::now();
    let outcome = run().unwrap_or_else(|e| Outcome {
        passed: false,
        detail: format!("error: {e}"),
        metrics: Value::Null,
    });
    Verdict {
        criterion,
        title,
        passed: outcome.passed,
        budget_seconds,
        seconds: start.elapsed().as_secs_f64(),
        detail: outcome.detail,
        metrics: outcome.metrics,
    }
}

fn pairs(list: &[(u32, u32)]) -> Vec<StencilPair> {
    list.iter().map(|&(a, b)| StencilPair::new(a, b)).collect()
}

/// The four unique solutions of the published coefficient tables, in order
/// of level.
pub fn published_stencils() -> Vec<StencilFamily> {
    type Row = (&'static [(u32, u32)], Vec<Rational>);
    let table: [Row; 4] = [
        (&[(0, 1)], vec![rat(1, 4)]),
        (&[(0, 1), (1, 1)], vec![rat(1, 5), rat(1, 20)]),
        (&[(0, 1), (1, 1), (0, 2)], vec![rat(16, 75), rat(1, 25), rat(-1, 300)]),
        (
            &[(0, 1), (1, 1), (0, 2), (1, 2)],
            vec![rat(38, 183), rat(103, 2379), rat(-17, 9516), rat(1, 2379)],
        ),
    ];
    table
        .into_iter()
        .map(|(p, a)| StencilFamily::new(pairs(p), a).expect("published stencils are valid"))
        .collect()
}

fn text(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational::to_text).collect()
}

/// Coefficient tables solved exactly, with their renormalization constants.
pub fn criterion_1() -> Verdict {
    timed(1, "coefficient tables", 1.0, || {
        let mut ok = true;
        let mut rows = Vec::new();
        let renorms = [rat(4, 1), rat(10, 3), rat(25, 7), rat(793, 231)];
        for (n, (want, m_want)) in published_stencils().iter().zip(&renorms).enumerate() {
            let level = n as u32 + 1;
            let set = solve_level(want.pairs(), level)?;
            let got = set.particular.clone().unwrap_or_default();
            let fam = StencilFamily::new(want.pairs().to_vec(), got.clone());
            let renorm = fam.as_ref().map(|f| f.renorm().clone()).ok();
            let good = set.kind == SolutionKind::Unique
                && got == want.coefficients()
                && renorm.as_ref() == Some(m_want);
            ok &= good;
            rows.push(json!({
                "level": level,
                "coefficients": text(&got),
                "renorm": renorm.as_ref().map(rational::to_text),
                "ok": good,
            }));
        }
        // Two pairs at level 1: the line A1 + A2 = 1/4.
        let set = solve_level(&pairs(&[(0, 1), (1, 1)]), 1)?;
        let sum = |v: &[Rational]| v.iter().fold(Rational::zero(), |a, b| a + b);
        let line = set.kind == SolutionKind::AffineFamily
            && set.null_basis.len() == 1
            && set.particular.as_deref().map(sum) == Some(rat(1, 4))
            && sum(&set.null_basis[0]).is_zero();
        ok &= line;
        rows.push(json!({
            "level": 1,
            "family": "A1 + A2 = 1/4",
            "particular": set.particular.as_deref().map(text),
            "null_basis": set.null_basis.iter().map(|v| text(v)).collect::<Vec<_>>(),
            "ok": line,
        }));
        Ok(Outcome {
            passed: ok,
            detail: "five systems, exact equality".into(),
            metrics: json!({ "systems": rows }),
        })
    })
}

/// `T_theta^(k) = (-1)^k 2^(2k+1)` and the level-2 cross-check.
pub fn criterion_2() -> Verdict {
    timed(2, "theta moments", 1.0, || {
        let mut mismatches = Vec::new();
        for k in 0..=12u32 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let want = Rational::from_integer((sign * (1i64 << (2 * k + 1))).into());
            if t_pk(StencilPair::THETA, k) != want {
                mismatches.push(k);
            }
        }
        let cross = rat(1, 5) * t_pk(StencilPair::new(0, 1), 1)
            + rat(1, 20) * t_pk(StencilPair::new(1, 1), 1);
        let passed = mismatches.is_empty() && cross == rat(-8, 1);
        Ok(Outcome {
            passed,
            detail: format!("k = 0..12 exact; cross-check = {}", rational::to_text(&cross)),
            metrics: json!({ "mismatched_k": mismatches, "cross_check": rational::to_text(&cross) }),
        })
    })
}

/// Neighbor-average sums annihilate every basis function except `f_(4k)`.
pub fn criterion_3() -> Verdict {
    timed(3, "neighbor sums of the harmonic basis", 10.0, || {
        let x = [0.5, 0.5];
        let l = 0.125;
        let mut worst_zero = 0.0f64;
        let mut worst_rel = 0.0f64;
        for p in pairs(&[(0, 1), (1, 1), (0, 2), (1, 2)]) {
            for n in 1..=12 {
                for spec in [HarmonicBasisSpec::f(n, x), HarmonicBasisSpec::g(n, x)] {
                    if spec.kind == BasisKind::F && n % 4 == 0 {
                        continue;
                    }
                    let h = harmonic_basis(&spec)?;
                    let s = neighbor_average_sum(&h, x, l, p, DEFAULT_QUAD_ORDER)?;
                    worst_zero = worst_zero.max(s.abs());
                }
            }
            let f4 = harmonic_basis(&HarmonicBasisSpec::f(4, x))?;
            let s = neighbor_average_sum(&f4, x, l, p, DEFAULT_QUAD_ORDER)?;
            let want = rational::to_f64(&t_pk(p, 1)) / 720.0 * (l / 2.0f64).powi(4);
            worst_rel = worst_rel.max(((s - want) / want).abs());
        }
        Ok(Outcome {
            passed: worst_zero <= 1e-12 && worst_rel <= 1e-10,
            detail: format!("max |I_p| on vanishing terms {worst_zero:.3e}; f_4 relative error {worst_rel:.3e}"),
            metrics: json!({ "max_vanishing": worst_zero, "f4_relative_error": worst_rel }),
        })
    })
}

fn top_level(profile: Profile, full: u32) -> u32 {
    match profile {
        Profile::Full => full,
        Profile::Quick => full - 2,
    }
}

/// `E_m(x, x) = 1 - 2^-m` and `E_m(x, y) = 0` for the level-1 stencil.
pub fn criterion_4(profile: Profile) -> Verdict {
    let top = top_level(profile, 8);
    timed(4, "energy closed form", 30.0, || {
        let s = &published_stencils()[0];
        let fx = grid_averages(&parse("x")?, top, DEFAULT_QUAD_ORDER)?;
        let fy = grid_averages(&parse("y")?, top, DEFAULT_QUAD_ORDER)?;
        let mut err_xx = 0.0f64;
        let mut err_xy = 0.0f64;
        let mut values = Vec::new();
        for m in 1..=top {
            let (gx, gy) = (fx.at(m).expect("level"), fy.at(m).expect("level"));
            let exx = energy(gx, gx, s)?;
            let exy = energy(gx, gy, s)?;
            err_xx = err_xx.max((exx - (1.0 - side_at(m))).abs());
            err_xy = err_xy.max(exy.abs());
            values.push(exx);
        }
        Ok(Outcome {
            passed: err_xx <= 1e-12 && err_xy <= 1e-13,
            detail: format!("m = 1..{top}: max |E_m(x,x) - (1 - 2^-m)| = {err_xx:.3e}, max |E_m(x,y)| = {err_xy:.3e}"),
            metrics: json!({ "energy_xx": values, "max_error_xx": err_xx, "max_abs_xy": err_xy }),
        })
    })
}

/// `E_m(f, f)` converges to the Dirichlet integral of `sin(x) e^y`.
pub fn criterion_5(profile: Profile) -> Verdict {
    let top = top_level(profile, 8);
    timed(5, "energy convergence", 60.0, || {
        let s = &published_stencils()[0];
        let f = parse("sin(x)*exp(y)")?;
        let reference = (1f64.exp().powi(2) - 1.0) / 2.0;
        let avg = grid_averages(&f, top, DEFAULT_QUAD_ORDER)?;
        let levels: Vec<u32> = (2..=top).collect();
        let errors = levels
            .iter()
            .map(|&m| {
                let g = avg.at(m).expect("level");
                Ok((energy(g, g, s)? - reference).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
        let sides: Vec<f64> = levels.iter().map(|&m| side_at(m)).collect();
        let order = log_log_fit(&sides, &errors)?.slope;
        Ok(Outcome {
            passed: decreasing && order >= 0.8,
            detail: format!("errors strictly decreasing: {decreasing}; fitted order {order:.3}"),
            metrics: json!({ "levels": levels, "errors": errors, "order": order, "reference": reference }),
        })
    })
}

/// Laplacian exact on `x^2 + y^2`, second order on `sin(x) e^(2y)`.
pub fn criterion_6(profile: Profile) -> Verdict {
    let top = top_level(profile, 8);
    timed(6, "laplacian exactness and convergence", 60.0, || {
        let s = &published_stencils()[0];
        let quad = grid_averages(&parse("x^2+y^2")?, top - 1, DEFAULT_QUAD_ORDER)?;
        let mut exact_err = 0.0f64;
        for m in 2..top {
            let field = discrete_laplacian(quad.at(m).expect("level"), s)?;
            for (_, _, v) in field.interior() {
                exact_err = exact_err.max((v - 4.0).abs());
            }
        }
        let f = parse("sin(x)*exp(2*y)")?;
        let avg = grid_averages(&f, top, DEFAULT_QUAD_ORDER)?;
        let levels: Vec<u32> = (3..=top).collect();
        let fields = levels
            .iter()
            .map(|&m| discrete_laplacian(avg.at(m).expect("level"), s))
            .collect::<Result<Vec<_>>>()?;
        let errors = fields
            .iter()
            .map(|field| laplacian_max_error(field, &f))
            .collect::<Result<Vec<f64>>>()?;
        // Diagnostic: the same error restricted to the fixed square
        // [1/4, 3/4]^2, away from the drifting boundary layer.
        let compact_errors = fields
            .iter()
            .map(|field| {
                let m = field.level();
                field
                    .interior()
                    .filter(|&(i, j, _)| {
                        let c = center_of(m, i, j);
                        c.iter().all(|t| (0.25..=0.75).contains(t))
                    })
                    .map(|(i, j, v)| Ok((v - eval_jet2(&f, center_of(m, i, j))?.laplacian()).abs()))
                    .try_fold(0.0f64, |acc, e: Result<f64>| Ok(acc.max(e?)))
            })
            .collect::<Result<Vec<f64>>>()?;
        let sides: Vec<f64> = levels.iter().map(|&m| side_at(m)).collect();
        let order = log_log_fit(&sides, &errors)?.slope;
        let compact_order = log_log_fit(&sides, &compact_errors)?.slope;
        let local_orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        Ok(Outcome {
            passed: exact_err <= 1e-10 && order >= 1.9,
            detail: format!(
                "max |Δ_m(x²+y²) - 4| = {exact_err:.3e}; fitted order {order:.3} \
                 (successive {}; on [1/4,3/4]² {compact_order:.3})",
                local_orders.iter().map(|o| format!("{o:.3}")).collect::<Vec<_>>().join(", ")
            ),
            metrics: json!({
                "max_error_quadratic": exact_err,
                "levels": levels,
                "max_errors": errors,
                "order": order,
                "successive_orders": local_orders,
                "compact_max_errors": compact_errors,
                "compact_order": compact_order,
            }),
        })
    })
}

/// Side ladder `2^-3 .. 2^-7` used by the defect criteria.
pub fn default_sides() -> Vec<f64> {
    (3..=7).map(side_at).collect()
}

/// Defect of `sin(x) e^y` decays at the rate `l^(4N)` and obeys its bound.
pub fn criterion_7() -> Verdict {
    timed(7, "mean value defect rate", 30.0, || {
        let x = [0.5, 0.5];
        let h = parse("sin(x)*exp(y)")?;
        // Every pure x-derivative of sin(x1) e^(x2) is ±sin or ±cos times e^(x2).
        let bounds = DerivativeBounds::exponential(f64::exp(x[1]), 1.0);
        let stencils = published_stencils();
        let mut ok = true;
        let mut rows = Vec::new();
        for (s, (lo, hi)) in stencils[..2].iter().zip([(3.7, 4.3), (7.5, 8.5)]) {
            let samples =
                defect_samples(&h, x, &default_sides(), s, Some(&bounds), &DefectOptions::default())?;
            let fit = fit_order(&samples)?;
            let bounded = samples
                .iter()
                .all(|d| d.defect.abs() <= d.bound.unwrap_or(f64::INFINITY) + 1e-11);
            let good = bounded && (lo..=hi).contains(&fit.slope);
            ok &= good;
            rows.push(json!({
                "level": s.level().lower_bound(),
                "sides": samples.iter().map(|d| d.side).collect::<Vec<_>>(),
                "defects": samples.iter().map(|d| d.defect).collect::<Vec<_>>(),
                "bounds": samples.iter().map(|d| d.bound).collect::<Vec<_>>(),
                "order": fit.slope,
                "r_squared": fit.r_squared,
                "within_bound": bounded,
                "ok": good,
            }));
        }
        let orders: Vec<String> = rows.iter().map(|r| format!("{:.3}", r["order"].as_f64().unwrap_or(f64::NAN))).collect();
        Ok(Outcome {
            passed: ok,
            detail: format!("fitted orders {}", orders.join(", ")),
            metrics: json!({ "stencils": rows }),
        })
    })
}

/// Exactness on harmonic polynomials below degree `4N`, closed-form defect
/// at degree `4N`.
pub fn criterion_8() -> Verdict {
    timed(8, "exactness sweep", 60.0, || {
        let mut ok = true;
        let mut rows = Vec::new();
        for s in published_stencils() {
            let report = exactness_sweep(&s, [0.5, 0.5], 0.0625, &DefectOptions::default())?;
            let top = report
                .rows
                .iter()
                .find(|r| r.kind == BasisKind::F && r.degree == 4 * report.level)
                .expect("f_4N row");
            let max_zero = report
                .rows
                .iter()
                .filter(|r| r.closed_form.is_none())
                .map(|r| r.defect.abs())
                .fold(0.0, f64::max);
            let nonzero = !report.leading_coefficient.is_zero();
            let good = report.passed() && nonzero && top.defect != 0.0;
            ok &= good;
            rows.push(json!({
                "level": report.level,
                "max_vanishing_defect": max_zero,
                "top_defect": top.defect,
                "closed_form": top.closed_form,
                "closed_form_coefficient": rational::to_text(&report.leading_coefficient),
                "status": top.status.as_str(),
                "ok": good,
            }));
            if top.status == SweepStatus::BelowFloor {
                ok &= nonzero;
            }
        }
        Ok(Outcome {
            passed: ok,
            detail: "levels 1..4 at l = 1/16".into(),
            metrics: json!({ "stencils": rows }),
        })
    })
}

/// Aggregation, quadrature exactness and interior counts.
pub fn criterion_9() -> Verdict {
    timed(9, "grid invariants", 10.0, || {
        let f = parse("sin(3*x)*exp(y) + x^3*y")?;
        let fine = grid_averages(&f, 6, DEFAULT_QUAD_ORDER)?;
        let mut aggregation = 0.0f64;
        for m in 0..6 {
            let direct = grid_averages(&f, m, DEFAULT_QUAD_ORDER)?;
            for (a, b) in fine.at(m).expect("level").values().iter().zip(direct.finest().values()) {
                aggregation = aggregation.max((a - b).abs());
            }
        }
        let mut quadrature = 0.0f64;
        for q in [1usize, 2, 3, 5, 8, 12] {
            let rule = GaussLegendre::<f64>::new(q)?;
            let top = 2 * q as i32 - 1;
            for a in 0..=top {
                for b in [0, a, top - a] {
                    let h = parse(&format!("x^{a}*y^{b}"))?;
                    let got = rule.average(&h, [0.5, 0.5], &1.0)?;
                    let want = 1.0 / ((a + 1) * (b + 1)) as f64;
                    quadrature = quadrature.max(((got - want) / want).abs());
                }
            }
        }
        let axis = [StencilPair::new(0, 1)];
        let counts: Vec<usize> = (1..=6).map(|m| interior_mask(m, &axis).count()).collect();
        let counts_ok = counts
            .iter()
            .zip(1..=6u32)
            .all(|(&c, m)| c == ((1usize << m) - 2).pow(2));
        Ok(Outcome {
            passed: aggregation <= 1e-13 && quadrature <= 1e-13 && counts_ok,
            detail: format!(
                "aggregation {aggregation:.3e}; quadrature relative error {quadrature:.3e}; |S_m| = {counts:?}"
            ),
            metrics: json!({
                "aggregation_error": aggregation,
                "quadrature_relative_error": quadrature,
                "interior_counts": counts,
            }),
        })
    })
}

/// Every criterion, in order.
pub fn run_all(profile: Profile) -> Vec<Verdict> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(profile),
        criterion_5(profile),
        criterion_6(profile),
        criterion_7(),
        criterion_8(),
        criterion_9(),
    ]
}

/// Exactness sweep of a user-supplied stencil, reported like a criterion.
pub fn check_stencil(stencil: &StencilFamily) -> Verdict {
    timed(0, "supplied stencil", 60.0, || {
        let report = exactness_sweep(stencil, [0.5, 0.5], 0.0625, &DefectOptions::default())?;
        let normalized = (stencil
            .pairs()
            .iter()
            .zip(stencil.coefficients())
            .fold(Rational::zero(), |acc, (p, a)| acc + crate::stencil::c_value(*p) * a)
            * rat(8, 1))
        .is_one();
        Ok(Outcome {
            passed: report.passed() && normalized,
            detail: format!("level {} sweep at l = 1/16", report.level),
            metrics: json!({
                "level": report.level,
                "failed_rows": report.rows.iter().filter(|r| r.status == SweepStatus::Fail).count(),
            }),
        })
    })
}
