//! CSV and JSON serialization of result tables.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};
use crate::error::{LabError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => Value::from(*v),
            Cell::Num(v) => Value::from(format_float(*v)),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest round-trip decimal; `nan`, `inf` and `-inf` for non-finite values.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch in table {}", self.name);
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column by name; non-numeric cells become NaN.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[i] {
                    Cell::Num(v) => v,
                    Cell::Int(v) => v as f64,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }
}

/// Everything a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: RunConfig,
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
}

fn metadata_lines(config: &RunConfig, table: &Table) -> Vec<String> {
    let mut lines = vec![
        format!("# medbw {VERSION}"),
        format!("# table = {}", table.name),
    ];
    lines.extend(config.to_pairs().into_iter().map(|(k, v)| format!("# {k} = {v}")));
    lines
}

/// CSV text for one table, with `#` metadata lines ahead of the header.
pub fn csv_string(config: &RunConfig, table: &Table) -> Result<String> {
    let mut text = metadata_lines(config, table).join("\n");
    text.push('\n');
    let mut writer = csv::Writer::from_writer(Vec::new());
    let path = PathBuf::from("<memory>");
    let csv_err = |source| LabError::Csv { path: path.clone(), source };
    writer.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| LabError::io("<memory>", e.into_error()))?;
    text.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    Ok(text)
}

/// JSON document holding the version, the resolved config and every table.
pub fn json_value(report: &Report) -> Result<Value> {
    let panels: Vec<Value> = report
        .tables
        .iter()
        .map(|t| {
            let rows: Vec<Value> = t
                .rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Value> =
                        t.columns.iter().cloned().zip(r.iter().map(Cell::to_json)).collect();
                    Value::Object(obj)
                })
                .collect();
            serde_json::json!({ "name": t.name, "columns": t.columns, "rows": rows })
        })
        .collect();
    Ok(serde_json::json!({
        "version": VERSION,
        "command": report.config.command.name(),
        "config": serde_json::to_value(&report.config)?,
        "warnings": report.warnings,
        "panels": panels,
    }))
}

/// Path used for `table` when several tables share one `--out` stem.
pub fn table_path(out: &Path, table: &str, many: bool) -> PathBuf {
    if !many {
        return out.to_path_buf();
    }
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out.extension().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    out.with_file_name(format!("{stem}_{table}.{ext}"))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| LabError::io(path, e))
}

/// Writes the report to `config.out`, or to `stdout` when it is unset.
/// Returns the files written.
pub fn emit(report: &Report, stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let out = report.config.out.as_deref();
    let mut written = Vec::new();
    match report.config.format {
        Format::Csv => {
            let many = report.tables.len() > 1;
            for (i, table) in report.tables.iter().enumerate() {
                let text = csv_string(&report.config, table)?;
                match out {
                    Some(out) => {
                        let path = table_path(out, &table.name, many);
                        write_file(&path, &text)?;
                        written.push(path);
                    }
                    None => {
                        if i > 0 {
                            writeln!(stdout).map_err(|e| LabError::io("<stdout>", e))?;
                        }
                        stdout.write_all(text.as_bytes()).map_err(|e| LabError::io("<stdout>", e))?;
                    }
                }
            }
        }
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&json_value(report)?)?;
            text.push('\n');
            match out {
                Some(out) => {
                    write_file(out, &text)?;
                    written.push(out.to_path_buf());
                }
                None => stdout.write_all(text.as_bytes()).map_err(|e| LabError::io("<stdout>", e))?,
            }
        }
    }
    Ok(written)
}
