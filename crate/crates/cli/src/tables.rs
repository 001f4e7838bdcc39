//! CSV files with `# key=value` metadata lines in front of the header.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use ionscat::{Error, Result};

use crate::archive::write_atomic;

/// Metadata key of the line left out of reproducibility comparisons.
pub const TIMESTAMP_KEY: &str = "generated_unix";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Fixed scientific notation used for every numeric cell.
pub fn num(x: f64) -> String {
    format!("{x:.10e}")
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn get_meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Archive(format!("missing column '{name}'")))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let stamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        out.push_str(&format!("# {TIMESTAMP_KEY}={stamp}\n"));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_text())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut t = Table::default();
        for line in text.lines() {
            if let Some(m) = line.strip_prefix('#') {
                if let Some((k, v)) = m.trim().split_once('=') {
                    if k != TIMESTAMP_KEY {
                        t.meta.push((k.to_string(), v.to_string()));
                    }
                }
            } else if line.trim().is_empty() {
                continue;
            } else if t.columns.is_empty() {
                t.columns = line.split(',').map(String::from).collect();
            } else {
                let row: Vec<String> = line.split(',').map(String::from).collect();
                if row.len() != t.columns.len() {
                    return Err(Error::Archive(format!("ragged row '{line}'")));
                }
                t.rows.push(row);
            }
        }
        Ok(t)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }
}

/// Parses a numeric cell.
pub fn float(cell: &str) -> Result<f64> {
    cell.parse()
        .map_err(|e| Error::Archive(format!("'{cell}' is not a number: {e}")))
}

/// Drops the timestamp line, for comparing reruns.
pub fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with(&format!("# {TIMESTAMP_KEY}=")))
        .collect::<Vec<_>>()
        .join("\n")
}
