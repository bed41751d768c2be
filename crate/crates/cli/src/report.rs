//! The JSON envelope shared by every subcommand.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1.0";

/// The schema every report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// A mathematical property failed on this instance.
    Falsified,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct Report<S: Serialize, R: Serialize> {
    pub schema_version: &'static str,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'static str,
    pub status: Status,
    /// Echo of the parsed arguments, seed included.
    pub spec: S,
    pub result: R,
    pub timing: Timing,
}

impl<S: Serialize, R: Serialize> Report<S, R> {
    pub fn new(command: &'static str, spec: S, result: R, status: Status, wall_seconds: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: "nlgap",
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            status,
            spec,
            result,
            timing: Timing { wall_seconds },
        }
    }
}

/// Pretty JSON to `path`, or stdout when `path` is `None`.
pub fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}
