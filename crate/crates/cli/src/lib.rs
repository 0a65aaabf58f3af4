//! Batch front end: a TOML configuration in, a JSON report and CSV tables out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod report;

use std::time::Instant;

use clap::ValueEnum;

use config::RunConfig;
use report::{Builder, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] cantor_scaling::error::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Ratios,
    Realize,
    Metric,
    Holder,
    Exponent,
    Whitney,
    Conjugacy,
    Lemma,
    GenExample,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ratios => "ratios",
            Command::Realize => "realize",
            Command::Metric => "metric",
            Command::Holder => "holder",
            Command::Exponent => "exponent",
            Command::Whitney => "whitney",
            Command::Conjugacy => "conjugacy",
            Command::Lemma => "lemma",
            Command::GenExample => "gen-example",
        }
    }

    pub const ALL: [Command; 9] = [
        Command::Ratios,
        Command::Realize,
        Command::Metric,
        Command::Holder,
        Command::Exponent,
        Command::Whitney,
        Command::Conjugacy,
        Command::Lemma,
        Command::GenExample,
    ];

    /// The configuration used when `--config` is absent.
    pub fn default_config(self) -> &'static str {
        match self {
            Command::Ratios => include_str!("../configs/ratios.toml"),
            Command::Realize => include_str!("../configs/realize.toml"),
            Command::Metric => include_str!("../configs/metric.toml"),
            Command::Holder => include_str!("../configs/holder.toml"),
            Command::Exponent => include_str!("../configs/exponent.toml"),
            Command::Whitney => include_str!("../configs/whitney.toml"),
            Command::Conjugacy => include_str!("../configs/conjugacy.toml"),
            Command::Lemma => include_str!("../configs/lemma.toml"),
            Command::GenExample => include_str!("../configs/gen-example.toml"),
        }
    }
}

/// Command-line overrides applied on top of the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub depth: Option<usize>,
    pub regroup: Option<usize>,
}

/// Applies overrides, validates, runs one command and assembles its report.
pub fn run(command: Command, mut config: RunConfig, ov: &Overrides) -> Result<Report, CliError> {
    if let Some(s) = ov.seed {
        config.seed = s;
    }
    if let Some(n) = ov.depth {
        config.params.depth = n;
    }
    let start = Instant::now();
    let mut b = Builder::default();
    let needs_source = !matches!(command, Command::Lemma | Command::GenExample);
    let src = if needs_source || config.system.is_some() || config.scaling.is_some() {
        Some(config.source(ov.regroup)?)
    } else {
        None
    };
    let need = || src.as_ref().expect("commands with sources build them above");
    match command {
        Command::Ratios => commands::ratios(&config, need(), &mut b)?,
        Command::Realize => commands::realize_cmd(&config, need(), &mut b)?,
        Command::Metric => commands::metric(&config, need(), &mut b)?,
        Command::Holder => commands::holder(&config, need(), &mut b)?,
        Command::Exponent => commands::exponent(&config, need(), &mut b)?,
        Command::Whitney => commands::whitney(&config, need(), &mut b)?,
        Command::Conjugacy => commands::conjugacy(&config, need(), &mut b)?,
        Command::Lemma => commands::lemma(&config, src.as_ref(), &mut b)?,
        Command::GenExample => commands::gen_example(&config, &mut b)?,
    }
    Ok(b.finish(command.name(), &config, ov.regroup, start.elapsed().as_secs_f64()))
}
