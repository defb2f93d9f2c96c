//! `siss <command> <config.toml>`: config-driven experiments writing CSV.
//!
//! Exit status: 0 success, 1 config or input error, 2 numerical failure,
//! 3 a `[check]` assertion failed.

mod commands;
mod config;
mod error;

use clap::{Parser, ValueEnum};
use error::{CliError, CliResult};
use siss::Exec;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    /// Lower Beurling density and separation of the set.
    Density,
    /// Frame bounds in coefficient and function domains plus Riesz bounds.
    Framebounds,
    /// Recover coefficients from derivative samples.
    Reconstruct,
    /// Density against lower frame bound along a dilation or deletion family.
    Sweep,
    /// Real zeros and their replication along the imaginary direction.
    Zeros,
    /// Jensen formula audit over a list of radii.
    Jensen,
    /// Zero counts of f and of shift * f + f'.
    Rolle,
    /// Multi-window Gabor lower bounds over a lattice family.
    Gabor,
}

#[derive(Debug, Parser)]
#[command(name = "siss", version, about = "Sampling, frame bounds and zero audits in shift-invariant spaces")]
struct Cli {
    command: Command,
    /// TOML config file.
    config: PathBuf,
    /// Output directory, overriding `run.output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("SISS_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("SISS_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> CliResult<commands::Report> {
    init_threads()?;
    let loaded = config::load(&cli.config)?;
    let out_dir = match (&cli.out, &loaded.config.run.output_dir) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => loaded.resolve(o),
        (None, None) => PathBuf::from("."),
    };
    let ctx = commands::Ctx { loaded, out_dir, exec: Exec::default() };
    let report = match cli.command {
        Command::Density => commands::density(&ctx),
        Command::Framebounds => commands::framebounds(&ctx),
        Command::Reconstruct => commands::reconstruct(&ctx),
        Command::Sweep => commands::sweep(&ctx),
        Command::Zeros => commands::zeros(&ctx),
        Command::Jensen => commands::jensen(&ctx),
        Command::Rolle => commands::rolle(&ctx),
        Command::Gabor => commands::gabor(&ctx),
    }?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(report) => {
            for (k, v) in &report.summary {
                println!("{k} = {v}");
            }
            for p in &report.files {
                println!("wrote {}", p.display());
            }
            let mut failed = Vec::new();
            for c in &report.checks {
                println!("check {} {}: {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
                if !c.pass {
                    failed.push(c.name);
                }
            }
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                let e = CliError::Check(failed.join(", "));
                eprintln!("siss: {e}");
                ExitCode::from(e.exit_code())
            }
        }
        Err(e) => {
            eprintln!("siss: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
