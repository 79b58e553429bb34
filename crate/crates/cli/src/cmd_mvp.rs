//! `mvp {defect, sweep, order}`.

use clap::{Args, Subcommand};
use dyadic_core::expr::BasisKind;
use dyadic_core::mvp::{
    defect_samples, exactness_sweep, fit_order, DefectOptions, DefectSample, DerivativeBounds,
    OrderFit, DEFAULT_BOUND_TERMS,
};
use dyadic_core::rational::to_text;
use serde::Serialize;

use crate::args::{parse_point, parse_sides, Format, FunctionArgs, PrecisionArg, Sides, StencilArgs};
use crate::cmd_fields::{OutArgs, QuadArgs};
use crate::error::{CliError, CliResult};
use crate::output::{csv_bytes, emit, emit_json, num, opt_num};

#[derive(Args, Debug)]
pub struct Measure {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    pub stencil: StencilArgs,
    /// Center x of the l-square.
    #[arg(long, default_value = "0.5,0.5", value_parser = parse_point)]
    pub center: [f64; 2],
    /// Side lengths: "2^-3..2^-7" or a comma list.
    #[arg(long, default_value = "2^-3..2^-7", value_parser = parse_sides)]
    pub sides: Sides,
    /// Certified |∂^(4k) h/∂ξ1^(4k)| <= MAG * GROWTH^(4k), as "MAG" or "MAG,GROWTH".
    /// Basis polynomials supply their own.
    #[arg(long, value_parser = parse_point_or_scalar)]
    pub deriv_bound: Option<[f64; 2]>,
    /// Terms of the bound summed before the tail estimate.
    #[arg(long, default_value_t = DEFAULT_BOUND_TERMS)]
    pub terms: u32,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Extended)]
    pub precision: PrecisionArg,
}

fn parse_point_or_scalar(text: &str) -> Result<[f64; 2], String> {
    match text.contains(',') {
        true => parse_point(text),
        false => text.trim().parse().map(|m| [m, 1.0]).map_err(|_| format!("bad bound `{text}`")),
    }
}

#[derive(Subcommand, Debug)]
pub enum MvpCmd {
    /// Defects over a ladder of side lengths, with the a priori bound.
    Defect {
        #[command(flatten)]
        measure: Measure,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exactness of the family on the harmonic polynomial basis.
    Sweep {
        #[command(flatten)]
        stencil: StencilArgs,
        #[arg(long, default_value = "0.5,0.5", value_parser = parse_point)]
        center: [f64; 2],
        /// Side length.
        #[arg(long, default_value_t = 0.0625)]
        l: f64,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long, value_enum, default_value_t = PrecisionArg::Extended)]
        precision: PrecisionArg,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Least-squares convergence order of the defect.
    Order {
        #[command(flatten)]
        measure: Measure,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

fn samples(m: &Measure) -> CliResult<Vec<DefectSample>> {
    let s = m.stencil.load()?;
    let (h, spec) = m.function.load()?;
    let bounds = match (spec, m.deriv_bound) {
        (Some(spec), _) => Some(DerivativeBounds::for_basis(&spec)),
        (None, Some([mag, growth])) => Some(DerivativeBounds::exponential(mag, growth)),
        (None, None) => None,
    };
    let opts = DefectOptions { quad_order: m.quad.quad, precision: m.precision.into() };
    let mut out = defect_samples(&h, m.center, &m.sides.0, &s, bounds.as_ref(), &opts)?;
    if m.terms != DEFAULT_BOUND_TERMS {
        for sample in &mut out {
            if let Some(b) = &bounds {
                sample.bound = Some(dyadic_core::mvp::defect_bound(Some(b), sample.side, &s, m.terms)?.total());
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct DefectRow {
    l: f64,
    defect: f64,
    bound: Option<f64>,
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct FitReport {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    sides: Vec<f64>,
    defects: Vec<f64>,
}

impl From<OrderFit> for FitReport {
    fn from(f: OrderFit) -> Self {
        FitReport { slope: f.slope, intercept: f.intercept, r_squared: f.r_squared, sides: f.sides, defects: f.defects }
    }
}

pub fn run(cmd: MvpCmd) -> CliResult {
    match cmd {
        MvpCmd::Defect { measure, out } => {
            let samples = samples(&measure)?;
            let rows: Vec<DefectRow> = samples
                .iter()
                .map(|s| DefectRow {
                    l: s.side,
                    defect: s.defect,
                    bound: s.bound,
                    ratio: s.bound.filter(|b| *b > 0.0).map(|b| s.defect.abs() / b),
                })
                .collect();
            let fit = fit_order(&samples).ok().map(FitReport::from);
            match &fit {
                Some(f) => eprintln!("fitted order {:.4} (r² {:.6}) over {} samples", f.slope, f.r_squared, f.sides.len()),
                None => eprintln!("no order fit: fewer than three defects above the rounding floor"),
            }
            match out.format {
                Format::Json => emit_json(&out.out, &serde_json::json!({
                    "center": measure.center,
                    "samples": rows,
                    "fit": fit,
                })),
                Format::Csv => {
                    let bytes = csv_bytes(
                        &["l", "defect", "bound", "ratio"],
                        rows.iter().map(|r| vec![num(r.l), num(r.defect), opt_num(r.bound), opt_num(r.ratio)]),
                    )?;
                    emit(&out.out, &bytes)
                }
            }
        }
        MvpCmd::Order { measure, out } => {
            let fit = FitReport::from(fit_order(&samples(&measure)?)?);
            emit_json(&out, &fit)
        }
        MvpCmd::Sweep { stencil, center, l, quad, precision, out } => {
            let s = stencil.load()?;
            let opts = DefectOptions { quad_order: quad.quad, precision: precision.into() };
            let report = exactness_sweep(&s, center, l, &opts)?;
            let kind = |k: BasisKind| if k == BasisKind::F { "f" } else { "g" };
            match out.format {
                Format::Json => {
                    let rows: Vec<_> = report
                        .rows
                        .iter()
                        .map(|r| serde_json::json!({
                            "kind": kind(r.kind),
                            "n": r.degree,
                            "defect": r.defect,
                            "closed_form": r.closed_form,
                            "status": r.status.as_str(),
                        }))
                        .collect();
                    emit_json(&out.out, &serde_json::json!({
                        "level": report.level,
                        "center": report.center,
                        "side": report.side,
                        "leading_coefficient": to_text(&report.leading_coefficient),
                        "rows": rows,
                    }))?;
                }
                Format::Csv => {
                    let bytes = csv_bytes(
                        &["kind", "n", "defect", "closed_form", "status"],
                        report.rows.iter().map(|r| {
                            vec![
                                kind(r.kind).to_string(),
                                r.degree.to_string(),
                                num(r.defect),
                                opt_num(r.closed_form),
                                r.status.as_str().to_string(),
                            ]
                        }),
                    )?;
                    emit(&out.out, &bytes)?;
                }
            }
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Core(dyadic_core::Error::Domain(
                    "exactness sweep found a row off its expected value".into(),
                )))
            }
        }
    }
}
