//! `grid averages`, `energy` and `laplacian`.

use std::path::PathBuf;

use clap::{Args, Subcommand};
use dyadic_core::expr::{eval_jet2, parse};
use dyadic_core::forms::{dirichlet_reference, discrete_laplacian, energy};
use dyadic_core::grid::{center_of, grid_averages, DEFAULT_QUAD_ORDER};
use serde::Serialize;

use crate::args::{parse_level, parse_quad, parse_level_range, Format, FunctionArgs, StencilArgs};
use crate::error::CliResult;
use crate::output::{csv_bytes, emit, emit_json, num, opt_num};

/// Quadrature order shared by the grid-based commands.
#[derive(Args, Debug, Clone, Copy)]
pub struct QuadArgs {
    /// Gauss–Legendre points per axis.
    #[arg(long = "quad", default_value_t = DEFAULT_QUAD_ORDER, value_parser = parse_quad)]
    pub quad: usize,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GridCmd {
    /// Cell averages of a function on the level-m grid.
    Averages {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, value_parser = parse_level)]
        m: u32,
        #[command(flatten)]
        quad: QuadArgs,
        /// Also write every coarser level, coarsest first.
        #[arg(long)]
        all_levels: bool,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Serialize)]
struct CellRow {
    level: u32,
    i: usize,
    j: usize,
    center_x: f64,
    center_y: f64,
    value: f64,
}

pub fn run_grid(cmd: GridCmd) -> CliResult {
    let GridCmd::Averages { function, m, quad, all_levels, out } = cmd;
    let (f, _) = function.load()?;
    let avg = grid_averages(&f, m, quad.quad)?;
    let first = if all_levels { 0 } else { m };
    let rows: Vec<CellRow> = avg.levels()[first as usize..]
        .iter()
        .flat_map(|g| {
            let n = g.width();
            (0..n * n).map(move |k| {
                let (i, j) = (k % n, k / n);
                let c = center_of(g.level(), i, j);
                CellRow { level: g.level(), i, j, center_x: c[0], center_y: c[1], value: g.get(i, j) }
            })
        })
        .collect();
    match out.format {
        Format::Json => emit_json(&out.out, &serde_json::json!({ "quad_order": quad.quad, "cells": rows })),
        Format::Csv => {
            let bytes = csv_bytes(
                &["level", "i", "j", "center_x", "center_y", "value"],
                rows.iter().map(|r| {
                    vec![
                        r.level.to_string(),
                        r.i.to_string(),
                        r.j.to_string(),
                        num(r.center_x),
                        num(r.center_y),
                        num(r.value),
                    ]
                }),
            )?;
            emit(&out.out, &bytes)
        }
    }
}

#[derive(Args, Debug)]
pub struct EnergyArgs {
    /// First function.
    #[arg(long)]
    pub f: String,
    /// Second function.
    #[arg(long)]
    pub g: String,
    #[command(flatten)]
    pub stencil: StencilArgs,
    /// Levels, e.g. "1..8".
    #[arg(long, value_parser = parse_level_range)]
    pub m_range: (u32, u32),
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct EnergyRow {
    m: u32,
    energy: f64,
    reference: f64,
    abs_error: f64,
}

pub fn run_energy(a: EnergyArgs) -> CliResult {
    let s = a.stencil.load()?;
    let (f, g) = (parse(&a.f)?, parse(&a.g)?);
    let (lo, hi) = a.m_range;
    let (af, ag) = (grid_averages(&f, hi, a.quad.quad)?, grid_averages(&g, hi, a.quad.quad)?);
    let reference = dirichlet_reference(&f, &g, a.quad.quad)?;
    let rows = (lo..=hi)
        .map(|m| {
            let e = energy(af.at(m).expect("level"), ag.at(m).expect("level"), &s)?;
            Ok(EnergyRow { m, energy: e, reference, abs_error: (e - reference).abs() })
        })
        .collect::<CliResult<Vec<_>>>()?;
    match a.out.format {
        Format::Json => emit_json(&a.out.out, &serde_json::json!({ "rows": rows })),
        Format::Csv => {
            let bytes = csv_bytes(
                &["m", "E_m", "reference", "abs_error"],
                rows.iter()
                    .map(|r| vec![r.m.to_string(), num(r.energy), num(r.reference), num(r.abs_error)]),
            )?;
            emit(&a.out.out, &bytes)
        }
    }
}

#[derive(Args, Debug)]
pub struct LaplacianArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[command(flatten)]
    pub stencil: StencilArgs,
    #[arg(long, value_parser = parse_level)]
    pub m: u32,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct LaplacianRow {
    i: usize,
    j: usize,
    center_x: f64,
    center_y: f64,
    delta_m: Option<f64>,
    reference: f64,
    abs_error: Option<f64>,
}

pub fn run_laplacian(a: LaplacianArgs) -> CliResult {
    let s = a.stencil.load()?;
    let (f, _) = a.function.load()?;
    let avg = grid_averages(&f, a.m, a.quad.quad)?;
    let field = discrete_laplacian(avg.finest(), &s)?;
    let n = field.width();
    let rows = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            let c = center_of(a.m, i, j);
            let reference = eval_jet2(&f, c)?.laplacian();
            let delta_m = field.get(i, j);
            Ok(LaplacianRow {
                i,
                j,
                center_x: c[0],
                center_y: c[1],
                delta_m,
                reference,
                abs_error: delta_m.map(|v| (v - reference).abs()),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    match a.out.format {
        Format::Json => emit_json(&a.out.out, &serde_json::json!({ "level": a.m, "cells": rows })),
        Format::Csv => {
            let bytes = csv_bytes(
                &["i", "j", "center_x", "center_y", "delta_m", "reference", "abs_error"],
                rows.iter().map(|r| {
                    vec![
                        r.i.to_string(),
                        r.j.to_string(),
                        num(r.center_x),
                        num(r.center_y),
                        opt_num(r.delta_m),
                        num(r.reference),
                        opt_num(r.abs_error),
                    ]
                }),
            )?;
            emit(&a.out.out, &bytes)
        }
    }
}
