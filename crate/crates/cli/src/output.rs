//! Long-format CSV tables, the JSON report and the run manifest.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::CliError;

pub const SCHEMA: u32 = 1;

pub enum Cell {
    F(f64),
    I(u64),
    S(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits round-trip every double
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(x) => x.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as u64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::S(x.to_string())
    }
}

pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self { name: name.to_string(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<String, CliError> {
        let file = format!("{}.csv", self.name);
        let mut w = csv::Writer::from_path(dir.join(&file)).map_err(io)?;
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(io)?;
        }
        w.flush().map_err(|e| io(e.into()))?;
        Ok(file)
    }
}

fn io(e: csv::Error) -> CliError {
    CliError::Validation(format!("cannot write output: {e}"))
}

/// What a scenario hands back.
pub struct Outcome {
    pub result: Value,
    pub tables: Vec<Table>,
}

pub fn report(command: &str, anchor: &str, knobs: &Value, status: &str, body: (&str, Value)) -> Value {
    let mut v = json!({
        "schema": SCHEMA,
        "command": command,
        "anchor": anchor,
        "params": knobs,
        "status": status,
    });
    v[body.0] = body.1;
    v
}

/// Write the report, the tables and a manifest into `dir`.
pub fn write_all(dir: &Path, command: &str, doc: &Value, tables: &[Table], knobs: &Value) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Validation(format!("cannot create {}: {e}", dir.display())))?;
    let mut files = vec![format!("{command}.json")];
    let text = serde_json::to_string_pretty(doc).expect("report serializes");
    fs::write(dir.join(&files[0]), text + "\n")
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", dir.display())))?;
    for t in tables {
        files.push(t.write(dir)?);
    }
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let manifest = json!({
        "schema": SCHEMA,
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "params": knobs,
        "files": files,
        "created_unix": stamp,
    });
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")
        .map_err(|e| CliError::Validation(format!("cannot write manifest: {e}")))?;
    Ok(())
}
