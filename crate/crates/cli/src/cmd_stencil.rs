//! `stencil {solve, tpk, level, table4}`.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Subcommand;
use dyadic_core::rational::to_text;
use dyadic_core::solver::{solve_level, SolutionFile, SolutionKind, SolutionSet};
use dyadic_core::stencil::{
    mean_value_level, parse_pairs, renorm_constant, t_pk, StencilPair, DEFAULT_K_MAX,
};

use crate::args::StencilArgs;
use crate::error::{CliError, CliResult};
use crate::output::{emit, emit_json, rational};

#[derive(Subcommand, Debug)]
pub enum StencilCmd {
    /// Solve the moment system for coefficients reaching a mean value level.
    Solve {
        /// Stencil pairs, e.g. "(0,1),(1,1),(0,2)".
        #[arg(long)]
        pairs: String,
        /// Target mean value level N.
        #[arg(long)]
        level: u32,
        /// Emit the solution set as JSON.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact moment T_p^(k).
    Tpk {
        #[arg(long)]
        pair: String,
        #[arg(long)]
        k: u32,
    },
    /// Mean value level and renormalization constant of a family.
    Level {
        #[command(flatten)]
        stencil: StencilArgs,
        /// Highest moment order checked.
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: u32,
    },
    /// The five published coefficient systems in one report.
    Table4 {
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cmd: StencilCmd) -> CliResult {
    match cmd {
        StencilCmd::Solve { pairs, level, json, out } => {
            let pairs = parse_pairs(&pairs)?;
            let set = solve_level(&pairs, level)?;
            if json {
                emit_json(&out, &SolutionFile::from(&set))?;
            } else {
                emit(&out, describe(&set).as_bytes())?;
            }
            if set.kind == SolutionKind::Infeasible {
                return Err(CliError::Infeasible(format!(
                    "no coefficients on {} reach mean value level {level}",
                    join_pairs(&pairs)
                )));
            }
            Ok(())
        }
        StencilCmd::Tpk { pair, k } => {
            let p = match parse_pairs(&pair)?.as_slice() {
                [p] => *p,
                _ => return Err(CliError::Usage("--pair takes exactly one pair".into())),
            };
            println!("{}", to_text(&t_pk(p, k)));
            Ok(())
        }
        StencilCmd::Level { stencil, k_max } => {
            let s = stencil.load()?;
            let level = mean_value_level(s.pairs(), s.coefficients(), k_max);
            println!("level: {level}");
            println!("M_P: {}", rational(s.renorm()));
            Ok(())
        }
        StencilCmd::Table4 { json, out } => {
            let systems = table4()?;
            if json {
                let files: Vec<SolutionFile> = systems.iter().map(|(_, s)| SolutionFile::from(s)).collect();
                emit_json(&out, &files)?;
            } else {
                let mut text = String::new();
                for (title, set) in &systems {
                    let _ = writeln!(text, "== {title} ==");
                    text.push_str(&describe(set));
                    text.push('\n');
                }
                emit(&out, text.as_bytes())?;
            }
            Ok(())
        }
    }
}

fn join_pairs(pairs: &[StencilPair]) -> String {
    pairs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

/// The published systems, titled.
pub fn table4() -> CliResult<Vec<(String, SolutionSet)>> {
    let systems: [(&str, u32); 5] = [
        ("(0,1)", 1),
        ("(0,1),(1,1)", 1),
        ("(0,1),(1,1)", 2),
        ("(0,1),(1,1),(0,2)", 3),
        ("(0,1),(1,1),(0,2),(1,2)", 4),
    ];
    systems
        .iter()
        .map(|&(pairs, n)| {
            let set = solve_level(&parse_pairs(pairs)?, n)?;
            Ok((format!("N={n} on {pairs}"), set))
        })
        .collect()
}

/// Human-readable solution report.
pub fn describe(set: &SolutionSet) -> String {
    let mut t = String::new();
    let _ = writeln!(t, "pairs: {}", join_pairs(&set.pairs));
    let _ = writeln!(t, "target level: {}", set.target_level);
    let kind = match set.kind {
        SolutionKind::Unique => "unique",
        SolutionKind::AffineFamily => "affine family",
        SolutionKind::Infeasible => "infeasible",
    };
    let _ = writeln!(t, "kind: {kind}");
    let Some(particular) = &set.particular else {
        return t;
    };
    let label = if set.null_basis.is_empty() { "A" } else { "particular A" };
    for (p, a) in set.pairs.iter().zip(particular) {
        let _ = writeln!(t, "{label}{p} = {}", rational(a));
    }
    for (i, v) in set.null_basis.iter().enumerate() {
        let entries: Vec<String> = v.iter().map(to_text).collect();
        let _ = writeln!(t, "null direction {}: ({})", i + 1, entries.join(", "));
    }
    let representative = set.min_norm_member().unwrap_or_else(|| particular.clone());
    if !set.null_basis.is_empty() {
        for (p, a) in set.pairs.iter().zip(&representative) {
            let _ = writeln!(t, "min-norm A{p} = {}", rational(a));
        }
    }
    let which = if set.null_basis.is_empty() { "" } else { " (min-norm member)" };
    match renorm_constant(&set.pairs, &representative) {
        Ok(m) => {
            let _ = writeln!(t, "M_P{which} = {}", rational(&m));
        }
        Err(e) => {
            let _ = writeln!(t, "M_P{which}: {e}");
        }
    }
    if let Some(level) = set.realized_level {
        let _ = writeln!(t, "realized level: {level}");
    }
    t
}
