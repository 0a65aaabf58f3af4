//! Report documents and their side tables.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A CSV side table, written next to the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Floats printed in full round-trip precision.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub config: RunConfig,
    pub regroup: Option<usize>,
    pub results: Value,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
    /// Wall time; the only field allowed to differ between identical runs.
    pub runtime_seconds: f64,
    #[serde(skip)]
    pub tables: Vec<Table>,
    #[serde(skip)]
    pub files: Vec<(String, String)>,
}

/// SHA-256 of the canonical JSON form of the effective configuration.
pub fn config_hash(config: &RunConfig, regroup: Option<usize>) -> String {
    let canonical = serde_json::to_string(&(config, regroup)).expect("configs serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Accumulates results and assertions for one command.
#[derive(Debug, Default)]
pub struct Builder {
    pub results: serde_json::Map<String, Value>,
    pub assertions: Vec<Assertion>,
    pub tables: Vec<Table>,
    pub files: Vec<(String, String)>,
}

impl Builder {
    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("results serialize");
        self.results.insert(key.into(), v);
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn finish(self, command: &str, config: &RunConfig, regroup: Option<usize>, runtime_seconds: f64) -> Report {
        let passed = self.assertions.iter().all(|a| a.passed);
        Report {
            command: command.into(),
            version: cantor_scaling::VERSION.into(),
            config_hash: config_hash(config, regroup),
            config: config.clone(),
            regroup,
            results: Value::Object(self.results),
            assertions: self.assertions,
            passed,
            runtime_seconds,
            tables: self.tables,
            files: self.files,
        }
    }
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Writes `report.json`, one CSV per table and any extra files into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), self.to_json() + "\n")?;
        for t in &self.tables {
            let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", t.name)))?;
            w.write_record(&t.header)?;
            for r in &t.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        for (name, body) in &self.files {
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

/// The report body with the runtime field removed, for determinism checks.
pub fn body_without_runtime(json: &str) -> Result<String, CliError> {
    let mut v: Value = serde_json::from_str(json)?;
    if let Value::Object(m) = &mut v {
        m.remove("runtime_seconds");
    }
    Ok(serde_json::to_string(&v)?)
}
