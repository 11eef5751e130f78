//! CSV serialization helpers and the small text parsers used by the CLI.
//!
//! All reals are written with 17 significant digits (`{:.16e}`), which
//! round-trips every finite `f64` exactly. Lines end in `\n`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Format a real with 17 significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header plus rows of already formatted fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Render as a JSON array of objects; numeric-looking fields stay numbers.
    pub fn render_json(&self) -> String {
        let mut out = String::from("[");
        for (r, row) in self.rows.iter().enumerate() {
            if r > 0 {
                out.push(',');
            }
            out.push_str("\n  {");
            for (c, (key, val)) in self.header.iter().zip(row).enumerate() {
                if c > 0 {
                    out.push_str(", ");
                }
                let is_number = val.parse::<f64>().map(|v| v.is_finite()).unwrap_or(false);
                if is_number {
                    let _ = write!(out, "\"{key}\": {val}");
                } else {
                    let _ = write!(out, "\"{key}\": \"{}\"", val.replace('"', "\\\""));
                }
            }
            out.push('}');
        }
        out.push_str("\n]\n");
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Parse comma-separated text without quoting. Blank lines are skipped;
/// every record must have as many fields as the header.
pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header_line) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let header: Vec<String> = header_line.split(',').map(|h| h.trim().to_string()).collect();
    if header.iter().any(|h| h.is_empty()) {
        return Err(Error::Parse {
            line: 1,
            message: "empty column name".into(),
        });
    }
    let mut table = CsvTable {
        header,
        rows: Vec::new(),
    };
    for (line, l) in lines {
        let row: Vec<String> = l.split(',').map(|f| f.trim().to_string()).collect();
        if row.len() != table.header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", table.header.len(), row.len()),
            });
        }
        table.rows.push(row);
    }
    Ok(table)
}

pub fn parse_real(field: &str, line: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: {field:?}"),
    })
}

/// `"0.5, 1,2e0"` -> `[0.5, 1.0, 2.0]`. Non-finite entries are rejected.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(Error::Parse {
                line: 1,
                message: "empty list entry".into(),
            });
        }
        let v = parse_real(item, 1)?;
        if !v.is_finite() {
            return Err(Error::Parse {
                line: 1,
                message: format!("non-finite entry {item:?}"),
            });
        }
        out.push(v);
    }
    Ok(out)
}

pub fn parse_int_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<usize>().map_err(|_| Error::Parse {
                line: 1,
                message: format!("not a non-negative integer: {item:?}"),
            })
        })
        .collect()
}
