//! `report`: the acceptance suite as JSON verdicts.

use std::path::PathBuf;

use clap::Args;
use dyadic_core::verify::{check_stencil, run_all, Profile};

use crate::args::read_stencil;
use crate::error::{CliError, CliResult};
use crate::output::emit_json;

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Shortened level ranges.
    #[arg(long, conflicts_with = "full")]
    pub quick: bool,
    /// The ranges stated by each criterion (default).
    #[arg(long)]
    pub full: bool,
    /// Also sweep this stencil family file.
    #[arg(long)]
    pub stencil: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(a: ReportArgs) -> CliResult {
    // Parse the stencil first so that a bad file fails fast.
    let extra = a.stencil.as_ref().map(read_stencil).transpose()?;
    let profile = if a.quick { Profile::Quick } else { Profile::Full };
    let mut verdicts = run_all(profile);
    if let Some(s) = extra {
        verdicts.push(check_stencil(&s));
    }
    for v in &verdicts {
        eprintln!(
            "criterion {} [{}] {}: {} ({:.2} s{})",
            v.criterion,
            v.status(),
            v.title,
            v.detail,
            v.seconds,
            if v.within_budget() { "" } else { ", over budget" }
        );
    }
    emit_json(&a.out, &verdicts)?;
    let failed = verdicts.iter().filter(|v| !v.passed).count();
    if failed > 0 {
        return Err(CliError::ReportFailed(failed));
    }
    Ok(())
}
