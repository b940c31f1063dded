//! Versioned CSV tables.
//!
//! ```text
//! # hylab-csv v1 schema=<name> units=hartree-atomic
//! t[au_time],r_p_x[bohr],...
//! 0.0000000000000000e0,...
//! ```
//!
//! Every value is written with `{:.16e}` (17 significant digits, enough to
//! round-trip an `f64`), in the fixed column order of the schema.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

pub const CSV_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: String,
    /// `(name, unit)` pairs.
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(schema: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            schema: schema.into(),
            columns: columns.iter().map(|(n, u)| (n.to_string(), u.to_string())).collect(),
            rows: Vec::new(),
        }
    }

    pub fn add_column(&mut self, name: impl Into<String>, unit: &str) {
        self.columns.push((name.into(), unit.into()));
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the {} schema", self.schema);
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = format!("# hylab-csv v{CSV_VERSION} schema={} units=hartree-atomic\n", self.schema);
        let header: Vec<String> = self.columns.iter().map(|(n, u)| format!("{n}[{u}]")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (k, v) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write!(out, "{v:.16e}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.render().as_bytes())?;
        f.flush()
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let banner = lines.next().ok_or("empty file")?;
        let schema = banner
            .strip_prefix(&format!("# hylab-csv v{CSV_VERSION} schema="))
            .and_then(|s| s.strip_suffix(" units=hartree-atomic"))
            .ok_or_else(|| format!("unrecognized banner `{banner}`"))?;
        let header = lines.next().ok_or("missing header row")?;
        let columns = header
            .split(',')
            .map(|h| {
                let (n, u) = h.split_once('[').ok_or_else(|| format!("column `{h}` has no unit"))?;
                Ok((n.to_string(), u.trim_end_matches(']').to_string()))
            })
            .collect::<Result<Vec<_>, String>>()?;
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|v| v.parse::<f64>().map_err(|e| format!("row {k}: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != columns.len() {
                return Err(format!("row {k} has {} fields for {} columns", row.len(), columns.len()));
            }
            rows.push(row);
        }
        Ok(Self { schema: schema.into(), columns, rows })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|(n, _)| n == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse_round_trip_exactly() {
        let mut t = Table::new("demo", &[("t", "au_time"), ("x", "bohr")]);
        t.push(vec![0.0, -1.0 / 3.0]);
        t.push(vec![1e-300, f64::INFINITY]);
        t.push(vec![std::f64::consts::PI, 6.02e23]);
        let text = t.render();
        assert!(text.starts_with("# hylab-csv v1 schema=demo units=hartree-atomic\nt[au_time],x[bohr]\n"));
        assert!(text.contains("-3.3333333333333331e-1"));
        let back = Table::parse(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.column("x").unwrap()[0].to_bits(), (-1.0f64 / 3.0).to_bits());
    }

    #[test]
    #[should_panic]
    fn ragged_rows_are_rejected() {
        Table::new("demo", &[("t", "au_time")]).push(vec![1.0, 2.0]);
    }
}
