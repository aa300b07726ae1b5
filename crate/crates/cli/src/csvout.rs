//! Deterministic CSV output: fixed-precision scientific floats, RFC-4180
//! style quoting, one header row naming columns and units.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

/// Render a float deterministically (17 significant digits round-trips f64).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// A CSV table accumulated in memory and written in one shot.
pub struct CsvTable {
    buffer: String,
    columns: usize,
}

impl CsvTable {
    /// Start a table with the given header row (column names with units).
    pub fn new(header: &[&str]) -> Self {
        let mut buffer = String::new();
        let cells: Vec<String> = header.iter().map(|h| quote(h)).collect();
        let _ = writeln!(buffer, "{}", cells.join(","));
        CsvTable { buffer, columns: header.len() }
    }

    pub fn row_f64(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.columns, "row width mismatch");
        let cells: Vec<String> = values.iter().map(|v| fmt_f64(*v)).collect();
        let _ = writeln!(self.buffer, "{}", cells.join(","));
    }

    pub fn row_mixed(&mut self, values: &[CsvValue]) {
        assert_eq!(values.len(), self.columns, "row width mismatch");
        let cells: Vec<String> = values
            .iter()
            .map(|v| match v {
                CsvValue::Float(f) => fmt_f64(*f),
                CsvValue::Int(i) => i.to_string(),
                CsvValue::Text(s) => quote(s),
            })
            .collect();
        let _ = writeln!(self.buffer, "{}", cells.join(","));
    }

    pub fn write_to(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.buffer.as_bytes())
    }
}

pub enum CsvValue {
    Float(f64),
    Int(i64),
    Text(String),
}
