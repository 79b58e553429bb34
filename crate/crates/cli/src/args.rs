//! Shared argument groups and their parsers.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use dyadic_core::expr::{harmonic_basis, parse, HarmonicBasisSpec};
use dyadic_core::grid::MAX_LEVEL;
use dyadic_core::{Expr, Precision, StencilFamily};

use crate::error::{CliError, CliResult};

/// A stencil family given inline or as a JSON file.
#[derive(Args, Debug, Clone)]
pub struct StencilArgs {
    /// Stencil pairs, e.g. "(0,1),(1,1)".
    #[arg(long, requires = "coeffs", conflicts_with = "stencil")]
    pub pairs: Option<String>,
    /// Coefficients matching --pairs, e.g. "1/5,1/20".
    #[arg(long, requires = "pairs", conflicts_with = "stencil")]
    pub coeffs: Option<String>,
    /// Stencil family JSON file.
    #[arg(long)]
    pub stencil: Option<PathBuf>,
}

impl StencilArgs {
    pub fn load(&self) -> CliResult<StencilFamily> {
        match (&self.pairs, &self.coeffs, &self.stencil) {
            (Some(p), Some(c), None) => Ok(StencilFamily::parse_inline(p, c)?),
            (None, None, Some(path)) => read_stencil(path),
            _ => Err(CliError::Usage(
                "give either --pairs with --coeffs, or --stencil FILE".into(),
            )),
        }
    }
}

pub fn read_stencil(path: &PathBuf) -> CliResult<StencilFamily> {
    let text = fs::read_to_string(path)?;
    StencilFamily::from_json(&text).map_err(|e| match e {
        dyadic_core::Error::Json(j) => CliError::Usage(format!("{}: {j}", path.display())),
        other => CliError::Usage(format!("{}: {other}", path.display())),
    })
}

/// A function given as an expression or as a harmonic basis shorthand.
#[derive(Args, Debug, Clone)]
pub struct FunctionArgs {
    /// Expression in x and y, e.g. "sin(x)*exp(y)".
    #[arg(long, conflicts_with = "basis")]
    pub expr: Option<String>,
    /// Harmonic basis polynomial, e.g. "f:4:@0.5,0.5".
    #[arg(long)]
    pub basis: Option<String>,
}

impl FunctionArgs {
    pub fn load(&self) -> CliResult<(Expr, Option<HarmonicBasisSpec>)> {
        match (&self.expr, &self.basis) {
            (Some(e), None) => Ok((parse(e)?, None)),
            (None, Some(b)) => {
                let spec: HarmonicBasisSpec = b.parse()?;
                Ok((harmonic_basis(&spec)?, Some(spec)))
            }
            _ => Err(CliError::Usage("give either --expr or --basis".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    Double,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Double => Precision::Double,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

/// Quadrature order in `[2, 64]`.
pub fn parse_quad(text: &str) -> Result<usize, String> {
    match text.trim().parse::<usize>() {
        Ok(q) if (2..=64).contains(&q) => Ok(q),
        _ => Err(format!("quadrature order must be an integer in [2, 64], got `{text}`")),
    }
}

pub fn parse_level(text: &str) -> Result<u32, String> {
    let m: u32 = text.trim().parse().map_err(|_| format!("`{text}` is not a level"))?;
    if m > MAX_LEVEL {
        return Err(format!("level {m} exceeds the maximum of {MAX_LEVEL}"));
    }
    Ok(m)
}

/// `a..b` (inclusive) or a single level.
pub fn parse_level_range(text: &str) -> Result<(u32, u32), String> {
    let (a, b) = match text.split_once("..") {
        Some((a, b)) => (parse_level(a)?, parse_level(b.trim_start_matches('='))?),
        None => {
            let m = parse_level(text)?;
            (m, m)
        }
    };
    if a > b {
        return Err(format!("empty level range `{text}`"));
    }
    Ok((a, b))
}

pub fn parse_point(text: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let a: f64 = a.parse().map_err(|_| format!("bad coordinate `{a}`"))?;
            let b: f64 = b.parse().map_err(|_| format!("bad coordinate `{b}`"))?;
            Ok([a, b])
        }
        _ => Err(format!("expected `x,y`, got `{text}`")),
    }
}

fn parse_side(token: &str) -> Result<f64, String> {
    let t = token.trim();
    if let Some(exp) = t.strip_prefix("2^") {
        let k: i32 = exp.parse().map_err(|_| format!("bad power `{t}`"))?;
        return Ok(2f64.powi(k));
    }
    let v: f64 = t.parse().map_err(|_| format!("bad side `{t}`"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("side must be positive, got `{t}`"))
    }
}

/// A ladder of side lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct Sides(pub Vec<f64>);

/// `2^-3..2^-7` (every power between, inclusive) or a comma list of sides.
pub fn parse_sides(text: &str) -> Result<Sides, String> {
    parse_side_list(text).map(Sides)
}

fn parse_side_list(text: &str) -> Result<Vec<f64>, String> {
    if let Some((a, b)) = text.split_once("..") {
        let exp = |s: &str| -> Result<i32, String> {
            s.trim()
                .strip_prefix("2^")
                .and_then(|e| e.parse().ok())
                .ok_or_else(|| format!("ranges need powers of two, got `{s}`"))
        };
        let (lo, hi) = (exp(a)?, exp(b)?);
        let step = if hi >= lo { 1 } else { -1 };
        let mut out = Vec::new();
        let mut k = lo;
        loop {
            out.push(2f64.powi(k));
            if k == hi {
                break;
            }
            k += step;
        }
        return Ok(out);
    }
    text.split(',').map(parse_side).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_level_range("1..4").unwrap(), (1, 4));
        assert_eq!(parse_level_range("3").unwrap(), (3, 3));
        assert!(parse_level_range("4..1").is_err());
        assert!(parse_level_range("1..11").is_err());
    }

    #[test]
    fn sides() {
        assert_eq!(parse_sides("2^-3..2^-5").unwrap().0, vec![0.125, 0.0625, 0.03125]);
        assert_eq!(parse_sides("0.25,2^-3").unwrap().0, vec![0.25, 0.125]);
        assert!(parse_sides("0..1").is_err());
        assert!(parse_sides("-1").is_err());
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("0.5, 0.25").unwrap(), [0.5, 0.25]);
        assert!(parse_point("0.5").is_err());
    }
}
