mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::{Cli, Command, Common, Format};
use commands::Report;

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("SUSYH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("SUSYH_THREADS = {raw:?} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn render(report: &Report, format: Format) -> Result<Vec<u8>> {
    Ok(match format {
        Format::Json => {
            let mut s = report.json.clone().into_bytes();
            s.push(b'\n');
            s
        }
        Format::Text => report.text.clone().into_bytes(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in &report.csv {
                w.write_record(row)?;
            }
            w.into_inner()?
        }
    })
}

fn emit(report: &Report, common: &Common) -> Result<()> {
    let bytes = render(report, common.format)?;
    match &common.out {
        Some(path) => std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    configure_threads()?;
    let (report, common) = match &cli.command {
        Command::Spectrum(a) => (commands::spectrum(a)?, &a.common),
        Command::Verify(a) => (commands::verify(a)?, &a.common),
        Command::Kernel(a) => (commands::kernel(a)?, &a.common),
        Command::Levels(a) => (commands::levels(a)?, &a.common),
        Command::Convergence(a) => (commands::convergence(a)?, &a.common),
    };
    emit(&report, common)?;
    if let Some(f) = &report.failure {
        eprintln!("check failed: {f}");
        return Ok(false);
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
