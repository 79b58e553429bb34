//! `dyadic`: stencil constants, cell-average forms and mean value defects
//! from the command line.

mod args;
mod cmd_fields;
mod cmd_mvp;
mod cmd_report;
mod cmd_stencil;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::{CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "dyadic", version, about)]
struct Cli {
    /// Worker threads for data-parallel sweeps.
    #[arg(long, global = true, env = "DYADIC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stencil moments, levels and coefficient solving.
    #[command(subcommand)]
    Stencil(cmd_stencil::StencilCmd),
    /// Cell averages on the dyadic grid.
    #[command(subcommand)]
    Grid(cmd_fields::GridCmd),
    /// Discrete energy E_m(f, g) against the Dirichlet integral.
    Energy(cmd_fields::EnergyArgs),
    /// Discrete Laplacian on one level against the classical one.
    Laplacian(cmd_fields::LaplacianArgs),
    /// Mean value defects.
    #[command(subcommand)]
    Mvp(cmd_mvp::MvpCmd),
    /// Run the acceptance suite.
    Report(cmd_report::ReportArgs),
}

fn run(cli: Cli) -> CliResult {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Stencil(c) => cmd_stencil::run(c),
        Command::Grid(c) => cmd_fields::run_grid(c),
        Command::Energy(a) => cmd_fields::run_energy(a),
        Command::Laplacian(a) => cmd_fields::run_laplacian(a),
        Command::Mvp(c) => cmd_mvp::run(c),
        Command::Report(a) => cmd_report::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
