//! Tabulated curves and their CSV form.
//!
//! A table is written as `# key=value` metadata lines, one header line, then
//! one line per grid point. Numbers use the shortest representation that
//! parses back to the same double, so parsing a file and writing it again
//! reproduces it byte for byte.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub column_names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: BTreeMap<String, String>,
}

impl CurveTable {
    pub fn new(column_names: Vec<String>) -> Self {
        CurveTable {
            column_names,
            rows: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.column_names.len());
        self.rows.push(row);
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.insert(key.to_string(), value.to_string());
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.get(key).map(String::as_str)
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Row lengths match the header and the first column strictly increases.
    pub fn validate(&self) -> CliResult<()> {
        if self.column_names.is_empty() {
            return Err(CliError::Format("table has no columns".into()));
        }
        if let Some(r) = self
            .rows
            .iter()
            .position(|r| r.len() != self.column_names.len())
        {
            return Err(CliError::Format(format!(
                "row {r} has {} values, header has {}",
                self.rows[r].len(),
                self.column_names.len()
            )));
        }
        if self
            .rows
            .windows(2)
            .any(|w| w[0][0].partial_cmp(&w[1][0]) != Some(Ordering::Less))
        {
            return Err(CliError::Format(format!(
                "grid column '{}' is not strictly increasing",
                self.column_names[0]
            )));
        }
        Ok(())
    }

    /// Trapezoid-rule integral of column `name` against the grid column.
    pub fn trapezoid(&self, name: &str) -> Option<f64> {
        let i = self.column_index(name)?;
        Some(
            self.rows
                .windows(2)
                .map(|w| 0.5 * (w[1][0] - w[0][0]) * (w[0][i] + w[1][i]))
                .sum(),
        )
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> CliResult<()> {
        self.validate()?;
        for (k, v) in &self.metadata {
            if k.contains('=') || k.contains('\n') || v.contains('\n') {
                return Err(CliError::Format(format!(
                    "metadata entry '{k}' cannot be written"
                )));
            }
            writeln!(out, "# {k}={v}")?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.column_names)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_number(x)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> CliResult<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| CliError::Format(e.to_string()))
    }

    pub fn read_csv<R: BufRead>(input: R) -> CliResult<Self> {
        let mut metadata = BTreeMap::new();
        let mut body = String::new();
        for line in input.lines() {
            let line = line?;
            if body.is_empty() {
                if let Some(entry) = line.strip_prefix('#') {
                    let entry = entry.strip_prefix(' ').unwrap_or(entry);
                    let (k, v) = entry.split_once('=').ok_or_else(|| {
                        CliError::Format(format!("metadata line without '=': {line}"))
                    })?;
                    metadata.insert(k.to_string(), v.to_string());
                    continue;
                }
            }
            body.push_str(&line);
            body.push('\n');
        }
        let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
        let column_names: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|_| CliError::Format(format!("not a number: '{s}'")))
                })
                .collect::<CliResult<Vec<f64>>>()?;
            rows.push(row);
        }
        let table = CurveTable {
            column_names,
            rows,
            metadata,
        };
        table.validate()?;
        Ok(table)
    }
}

/// Shortest round-trip decimal; scientific notation outside `[1e-5, 1e16)`.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [
            0.0,
            -0.0,
            1.0,
            0.1,
            1e-5,
            9.99e-6,
            1e16,
            123456.789,
            -2.5e-300,
            5e-324,
            f64::MAX,
        ] {
            let s = format_number(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_number(1e-7), "1e-7");
        assert_eq!(format_number(0.25), "0.25");
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let mut t = CurveTable::new(vec!["theta".into(), "y".into()]);
        t.set_meta("mu", 1.0);
        t.set_meta("note", "a, b");
        t.push_row(vec![-1.0, 1e-300]);
        t.push_row(vec![0.5, 0.1 + 0.2]);
        let s = t.to_csv_string().unwrap();
        let back = CurveTable::read_csv(s.as_bytes()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_csv_string().unwrap(), s);
    }

    #[test]
    fn rejects_unsorted_grid() {
        let mut t = CurveTable::new(vec!["x".into()]);
        t.push_row(vec![1.0]);
        t.push_row(vec![1.0]);
        assert!(t.to_csv_string().is_err());
    }
}
