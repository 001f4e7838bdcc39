use std::path::Path;

use crate::error::{Error, Result};

/// Minimum number of samples accepted in a tabulated curve.
pub const MIN_SAMPLES: usize = 8;

/// Reads "R value" pairs; '#' starts a comment line.
pub fn parse_table(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut r = Vec::new();
    let mut v = Vec::new();
    let mut last_line = 0;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        last_line = line_no;
        let mut fields = trimmed.split_whitespace();
        let parse = |field: Option<&str>, what: &str| -> Result<f64> {
            let field = field.ok_or_else(|| Error::Ingestion {
                line: line_no,
                reason: format!("missing {what} column"),
            })?;
            field.parse::<f64>().map_err(|_| Error::Ingestion {
                line: line_no,
                reason: format!("cannot parse {what} '{field}'"),
            })
        };
        let x = parse(fields.next(), "R")?;
        let y = parse(fields.next(), "value")?;
        if fields.next().is_some() {
            return Err(Error::Ingestion {
                line: line_no,
                reason: "expected exactly two columns".into(),
            });
        }
        if let Some(&prev) = r.last() {
            if x <= prev {
                return Err(Error::Ingestion {
                    line: line_no,
                    reason: format!("R = {x} does not increase (previous {prev})"),
                });
            }
        }
        r.push(x);
        v.push(y);
    }
    if r.len() < MIN_SAMPLES {
        return Err(Error::Ingestion {
            line: last_line,
            reason: format!("need at least {MIN_SAMPLES} samples, found {}", r.len()),
        });
    }
    Ok((r, v))
}

pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    parse_table(&text)
}
