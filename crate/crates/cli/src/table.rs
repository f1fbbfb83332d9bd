//! CSV files with `#` metadata lines.
//!
//! ```text
//! # <preamble lines>
//! t,x,y,z
//! <rows>
//! # <trailer lines>
//! ```
//!
//! Values are written with 17 significant digits, so reading a file and
//! writing it again reproduces it byte for byte.

use crate::CliError;
use std::io::{self, BufRead, Write};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    /// Metadata before the header, without the `# ` prefix.
    pub preamble: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Metadata after the data rows, without the `# ` prefix.
    pub trailer: Vec<String>,
}

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

impl CsvTable {
    pub fn write_to(&self, w: &mut dyn Write) -> io::Result<()> {
        for line in &self.preamble {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "{}", self.header.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        for line in &self.trailer {
            writeln!(w, "# {line}")?;
        }
        Ok(())
    }

    pub fn read_from(r: impl BufRead) -> Result<Self, CliError> {
        let mut preamble = Vec::new();
        let mut trailer = Vec::new();
        let mut data = String::new();
        for line in r.lines() {
            let line = line.map_err(|e| CliError::io("reading CSV", e))?;
            if let Some(meta) = line.strip_prefix('#') {
                let meta = meta.strip_prefix(' ').unwrap_or(meta).to_string();
                if data.is_empty() {
                    preamble.push(meta);
                } else {
                    trailer.push(meta);
                }
            } else if !trailer.is_empty() {
                return Err(CliError::Usage("CSV data after trailing metadata".into()));
            } else {
                data.push_str(&line);
                data.push('\n');
            }
        }
        let mut reader = csv::Reader::from_reader(data.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header.is_empty() {
            return Err(CliError::Usage("CSV file has no header row".into()));
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .map(|cell| {
                    cell.trim().parse::<f64>().map_err(|_| {
                        CliError::Usage(format!("row {}: {cell:?} is not a number", i + 1))
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            rows.push(row);
        }
        Ok(Self {
            preamble,
            header,
            rows,
            trailer,
        })
    }

    /// Column by header name or zero-based position.
    pub fn column(&self, key: &str) -> Result<Vec<f64>, CliError> {
        let index = match self.header.iter().position(|h| h == key) {
            Some(i) => i,
            None => key
                .parse::<usize>()
                .ok()
                .filter(|i| *i < self.header.len())
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "no column {key:?} (columns: {})",
                        self.header.join(",")
                    ))
                })?,
        };
        Ok(self.rows.iter().map(|r| r[index]).collect())
    }
}
