//! The JSON report written by every subcommand.

use std::io::Write;
use std::path::Path;

use conflab_core::CheckReport;
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub version: &'static str,
    pub config: serde_json::Value,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
    /// `None` under `--no-timing`.
    pub wall_ms: Option<f64>,
    /// Command-specific computed values.
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub results: serde_json::Value,
}

impl ReportDocument {
    pub fn new(config: serde_json::Value, checks: Vec<CheckReport>, results: serde_json::Value) -> Self {
        let pass = checks.iter().all(|c| !c.is_failure());
        ReportDocument { version: env!("CARGO_PKG_VERSION"), config, checks, pass, wall_ms: None, results }
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Serialize(e.to_string()))
    }

    /// Writes to `path`, or stdout when `None`.
    pub fn write(&self, path: Option<&Path>) -> CliResult<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        match path {
            Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io { path: "<stdout>".into(), source })
            }
        }
    }
}
