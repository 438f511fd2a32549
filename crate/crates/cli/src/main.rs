use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use qucc::runner::{self, RunConfig, RunOptions, Severity};

#[derive(Parser)]
#[command(
    name = "qucc",
    version,
    about = "Unitary coupled-cluster VQE scans on a statevector simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (point, method) cell of a scan and write the reports.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated method list, e.g. `uccsd,oo-puccd`.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// Point indices, e.g. `0,2,4-6`.
        #[arg(long)]
        points: Option<String>,
    },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Validate { config } => {
            let cfg = RunConfig::load(&config)?;
            let findings = runner::validate(&cfg);
            for f in &findings {
                let tag = match f.severity {
                    Severity::Error => "error",
                    Severity::Warning => "warning",
                };
                println!("{tag}: {}", f.message);
            }
            if findings.iter().any(|f| f.severity == Severity::Error) {
                return Ok(ExitCode::FAILURE);
            }
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            config,
            out,
            methods,
            points,
        } => {
            let cfg = RunConfig::load(&config)?;
            let options = RunOptions {
                output: out,
                methods,
                points: points.as_deref().map(runner::parse_point_range).transpose()?,
            };
            let report = runner::run(&cfg, &options).with_context(|| format!("running {}", config.display()))?;
            for (method, energies) in &report.energies {
                let done = energies.iter().filter(|e| e.is_some()).count();
                println!("{method}: {done}/{} points", energies.len());
            }
            println!("reports written to {}", report.output_dir.display());
            if report.success() {
                return Ok(ExitCode::SUCCESS);
            }
            for f in &report.failures {
                eprintln!("failed: {} at {}: {}", f.method, f.point, f.message);
            }
            Ok(ExitCode::FAILURE)
        }
    }
}
