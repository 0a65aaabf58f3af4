use std::path::PathBuf;
use std::process::ExitCode;

use cantor_cli::config::RunConfig;
use cantor_cli::{run, CliError, Command, Overrides};
use clap::Parser;

/// Scaling-function and smoothness reports for Cantor sets of expanding maps.
#[derive(Debug, Parser)]
#[command(name = "cantor", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML configuration; each command has a built-in default.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report.json and CSV tables; the report goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    depth: Option<usize>,
    /// Group symbols in blocks of N before analysis.
    #[arg(long)]
    regroup: Option<usize>,
}

fn execute(cli: &Cli) -> Result<bool, CliError> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p)?,
        None => cli.command.default_config().to_string(),
    };
    let config = RunConfig::parse(&text)?;
    let ov = Overrides {
        seed: cli.seed,
        depth: cli.depth,
        regroup: cli.regroup,
    };
    let report = run(cli.command, config, &ov)?;
    match &cli.out {
        Some(dir) => {
            report.write(dir)?;
            let passed = report.assertions.iter().filter(|a| a.passed).count();
            println!(
                "{}: {passed}/{} assertions passed, report in {}",
                report.command,
                report.assertions.len(),
                dir.display()
            );
        }
        None => println!("{}", report.to_json()),
    }
    for a in report.assertions.iter().filter(|a| !a.passed) {
        eprintln!("FAILED {}: {}", a.name, a.detail);
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
