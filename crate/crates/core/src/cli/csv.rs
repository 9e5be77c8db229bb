//! CSV output with an embedded run manifest.
//!
//! Manifest lines start with `#` and carry everything that varies between
//! runs (the timestamp); data rows depend only on the flags.

use std::fmt::Write as _;
use std::io::Write;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            parameters: Vec::new(),
            tool_version: TOOL_VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.push((key.to_string(), value.to_string()));
        self
    }

    pub fn header_lines(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# command = {}", self.command).unwrap();
        for (k, v) in &self.parameters {
            writeln!(out, "# {k} = {v}").unwrap();
        }
        writeln!(out, "# tool_version = {}", self.tool_version).unwrap();
        writeln!(out, "# timestamp = {}", self.timestamp).unwrap();
        out
    }
}

/// Scientific notation with 13 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn write_csv<W: Write>(
    out: &mut W,
    manifest: &RunManifest,
    columns: &[&str],
    rows: &[Vec<String>],
) -> std::io::Result<()> {
    out.write_all(manifest.header_lines().as_bytes())?;
    writeln!(out, "{}", columns.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()
}
