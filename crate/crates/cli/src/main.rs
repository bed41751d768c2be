//! `nlgap`: experiment runner over nlgap-core.
//!
//! Exit codes: 0 success, 2 when a checked property fails on the instance,
//! 1 for usage, input and resource errors.

mod commands;
mod inputs;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::Outcome;
use report::{emit, Report, Status};

#[derive(Debug, Parser)]
#[command(name = "nlgap", version, about = "Random regular graphs, expansion checks and Poincaré-constant tools")]
struct Cli {
    /// Worker threads for gen and the sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample uniform simple d-regular graphs to edge-list files.
    Gen(commands::GenArgs),
    /// Eigenvalues, Cheeger sandwich and Friedman threshold.
    Spectra(commands::SpectraArgs),
    /// Long-range expansion checks.
    Expan(commands::ExpanArgs),
    /// Lower bound on the nonlinear spectral gap by annealing.
    Gamma(commands::GammaArgs),
    /// Replay the certification pipeline on one field.
    Certify(commands::CertifyArgs),
    /// Cotype constant of a vector list.
    Cotype(commands::CotypeArgs),
    /// Evaluate named constants.
    Constants(commands::ConstantsArgs),
    /// Average distance against the bi-Lipschitz chain, as CSV.
    UcSweep(commands::UcSweepArgs),
    /// Spectral and distance statistics over an (n, d, sample) grid, as CSV.
    Sweep(commands::SweepArgs),
    /// Print the JSON schema all reports validate against.
    Schema,
}

/// `Some("-")` and `None` both mean stdout.
fn out_path(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref().filter(|p| p.as_os_str() != "-")
}

fn finish<S: Serialize, R: Serialize>(
    name: &'static str,
    spec: &S,
    outcome: Outcome<R>,
    start: Instant,
    path: Option<&Path>,
) -> Result<bool> {
    let status = if outcome.falsified { Status::Falsified } else { Status::Ok };
    emit(&Report::new(name, spec, outcome.result, status, start.elapsed().as_secs_f64()), path)?;
    Ok(outcome.falsified)
}

fn run(cli: &Cli) -> Result<bool> {
    let start = Instant::now();
    let jobs = cli.jobs.max(1);
    match &cli.command {
        Command::Gen(a) => {
            let manifest = a.out.join("manifest.json");
            finish("gen", a, commands::gen(a, jobs)?, start, Some(&manifest))
        }
        Command::Spectra(a) => finish("spectra", a, commands::spectra(a)?, start, out_path(&a.json)),
        Command::Expan(a) => finish("expan", a, commands::expan(a)?, start, out_path(&a.json)),
        Command::Gamma(a) => finish("gamma", a, commands::gamma(a)?, start, out_path(&a.json)),
        Command::Certify(a) => finish("certify", a, commands::certify(a)?, start, out_path(&a.json)),
        Command::Cotype(a) => finish("cotype", a, commands::cotype(a)?, start, out_path(&a.json)),
        Command::Constants(a) => finish("constants", a, commands::constants(a)?, start, out_path(&a.json)),
        Command::UcSweep(a) => {
            commands::write_csv(&commands::uc_sweep(a, jobs)?, commands::UC_HEADER, a.csv.as_ref())?;
            Ok(false)
        }
        Command::Sweep(a) => {
            commands::write_csv(&commands::sweep(a, jobs)?, commands::SWEEP_HEADER, a.csv.as_ref())?;
            Ok(false)
        }
        Command::Schema => {
            print!("{}", report::REPORT_SCHEMA);
            Ok(false)
        }
    }
}

fn is_falsification(e: &anyhow::Error) -> bool {
    e.chain().any(|c| matches!(c.downcast_ref::<nlgap_core::Error>(), Some(nlgap_core::Error::Falsified { .. })))
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
    match run(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_falsification(&e) { 2 } else { 1 })
        }
    }
}
