//! `sspe`: run propagation scenarios, validate the engine, inspect outputs.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 runtime or
//! numerical failure, 3 validation failure.

use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sspe_core::{parse_config, pefm, run_scenario, validation, PeError};

#[derive(Parser)]
#[command(name = "sspe", version, about = "Split-step parabolic-equation radio propagation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write a PEFM field map plus its manifest.
    Run {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run acceptance suites against their oracles.
    Validate {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Convert a PEFM file to CSV.
    Export {
        file: PathBuf,
        #[arg(long, required = true)]
        csv: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the header of a PEFM file.
    Info { file: PathBuf },
}

const USAGE: u8 = 1;
const RUNTIME: u8 = 2;
const VALIDATION: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<PeError>() {
        Some(e) if e.is_usage() => USAGE,
        _ => RUNTIME,
    }
}

fn run(config: &Path, output: &Path) -> Result<()> {
    let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = parse_config(&text)?;
    let base = config.parent().unwrap_or(Path::new("."));
    let summary = run_scenario(&cfg, base, output)?;
    println!(
        "wrote {} ({} x {}), manifest {}, {:.2} s",
        summary.map_path.display(),
        summary.n_range,
        summary.n_height,
        summary.manifest_path.display(),
        summary.seconds
    );
    Ok(())
}

fn validate(suite: &str) -> Result<bool> {
    let names: Vec<&str> = if suite == "all" { validation::SUITES.to_vec() } else { vec![suite] };
    let mut ok = true;
    for name in names {
        for report in validation::run_suite(name)? {
            println!("{report}");
            ok &= report.passed();
        }
    }
    Ok(ok)
}

fn export(file: &Path, output: Option<&Path>) -> Result<()> {
    let map = pefm::read_file(file)?;
    match output {
        Some(path) => {
            let mut buf = Vec::new();
            pefm::export_csv(&map, &mut buf)?;
            pefm::write_atomic(path, &buf)?;
        }
        None => {
            let stdout = io::stdout().lock();
            let mut w = BufWriter::new(stdout);
            pefm::export_csv(&map, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn info(file: &Path) -> Result<()> {
    let bytes = std::fs::read(file).with_context(|| format!("reading {}", file.display()))?;
    let header = pefm::decode_header(&bytes)?;
    pefm::decode(&bytes)?;
    print!("{}", pefm::describe(&header));
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match &cli.command {
        Command::Run { config, output } => run(config, output).map(|()| true),
        Command::Validate { suite } => validate(suite),
        Command::Export { file, output, .. } => export(file, output.as_deref()).map(|()| true),
        Command::Info { file } => info(file).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VALIDATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
