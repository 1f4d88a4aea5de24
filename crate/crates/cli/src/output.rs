//! Rendering of command results and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{Format, OutputArgs};
use crate::CliError;

/// A header row and its records, all already formatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

/// Shortest round-trip decimal with `.` as separator.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Everything a command can emit; the requested format picks one part.
#[derive(Debug, Default)]
pub struct Report {
    pub json: Value,
    pub table: Option<Table>,
    /// Additional CSV files, keyed by the suffix appended to the output stem.
    pub side_tables: Vec<(&'static str, Table)>,
    pub svg: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Map<String, Value>,
    pub tool_version: String,
    pub timestamp: String,
    pub outputs: Vec<String>,
}

fn format_for(args: &OutputArgs) -> Format {
    if let Some(f) = args.format {
        return f;
    }
    match args.out.as_ref().and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("csv") => Format::Csv,
        Some("svg") => Format::Svg,
        _ => Format::Json,
    }
}

fn sibling(out: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}{suffix}.{ext}"))
}

/// Path of the manifest written alongside `out`.
pub fn manifest_path(out: &Path) -> PathBuf {
    sibling(out, ".manifest", "json")
}

/// Write `report` in the requested format, plus a manifest when writing to a file.
pub fn emit(command: &str, parameters: Value, args: &OutputArgs, report: Report) -> Result<(), CliError> {
    let format = format_for(args);
    let unsupported = || CliError::Usage(format!("{command} has no {} output", format.extension()));
    let (body, sides) = match format {
        Format::Json => {
            let mut s = serde_json::to_vec_pretty(&report.json)?;
            s.push(b'\n');
            (s, vec![])
        }
        Format::Csv => (report.table.ok_or_else(unsupported)?.to_csv()?, report.side_tables),
        Format::Svg => (report.svg.ok_or_else(unsupported)?.into_bytes(), vec![]),
    };

    let Some(out) = &args.out else {
        std::io::stdout().lock().write_all(&body)?;
        return Ok(());
    };
    std::fs::write(out, &body)?;
    let mut outputs = vec![out.display().to_string()];
    for (suffix, table) in sides {
        let path = sibling(out, &format!("_{suffix}"), "csv");
        std::fs::write(&path, table.to_csv()?)?;
        outputs.push(path.display().to_string());
    }
    let parameters = match parameters {
        Value::Object(m) => m,
        other => serde_json::Map::from_iter([("value".to_string(), other)]),
    };
    let manifest = RunManifest {
        command: command.to_string(),
        parameters,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339(),
        outputs,
    };
    std::fs::write(manifest_path(out), serde_json::to_vec_pretty(&manifest)?)?;
    Ok(())
}
